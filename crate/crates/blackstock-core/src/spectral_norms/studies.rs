//! Norm studies of the linear flow for Gaussian data.

use super::data::{GaussianData, ThirdDatum};
use super::fit::{fit_power_law, DecayFit};
use super::grid::{RadialGrid, Zone};
use super::laws::{law_d, law_d_tilde};
use super::NormError;
use crate::model::{characteristic_roots, ModelParams};
use crate::phase_solver::{kernels_at, profiles_at, viscoelastic_kernels};
use num_complex::Complex64;
use std::f64::consts::PI;

type C = Complex64;

/// Solution triple `(ψ̂, ψ̂ₜ, ψ̂ₜₜ)` at `(r, t)`, with a shortcut where the data vanish.
pub fn solution_hat(params: &ModelParams, data: &GaussianData, r: f64, t: f64) -> Result<[C; 3], NormError> {
    let h = data.hats(r);
    if h.iter().all(|v| *v == 0.0) {
        return Ok([C::new(0.0, 0.0); 3]);
    }
    let roots = characteristic_roots(params, r)?;
    let k = kernels_at(&roots, t)?;
    Ok(k.apply(h.map(|v| C::new(v, 0.0))))
}

fn check_time_grid(t_grid: &[f64]) -> Result<(), NormError> {
    match t_grid.iter().find(|t| !(**t >= 0.0) || !t.is_finite()) {
        Some(t) => Err(NormError::BadTime(*t)),
        None => Ok(()),
    }
}

fn grid_at(grid: &RadialGrid, n: usize, t: f64, rate: f64) -> RadialGrid {
    let g = if grid.n == n {
        grid.clone()
    } else {
        grid.with_dimension(n)
    };
    g.adapted(t, rate)
}

/// Oscillation envelope rate of the linear flow at low frequency.
fn flow_rate(params: &ModelParams) -> f64 {
    0.5 * params.delta()
}

/// Runs `f` over a time grid, mapping each failure to its time.
fn per_time<T>(t_grid: &[f64], mut f: impl FnMut(f64) -> Result<T, NormError>) -> Result<Vec<T>, NormError> {
    t_grid.iter().map(|t| f(*t)).collect()
}

/// `‖m‖_{L²}` for a radial multiplier over the chosen zone.
pub fn l2_norm_radial<F>(multiplier: F, grid: &RadialGrid, zone: Zone) -> Result<f64, NormError>
where
    F: Fn(f64) -> C + Sync,
{
    Ok(grid.integrate(zone, |r| [multiplier(r).norm_sqr()])?[0].sqrt())
}

/// `‖m‖_{L¹}` for a radial multiplier over the chosen zone.
pub fn l1_norm_radial<F>(multiplier: F, grid: &RadialGrid, zone: Zone) -> Result<f64, NormError>
where
    F: Fn(f64) -> C + Sync,
{
    Ok(grid.integrate(zone, |r| [multiplier(r).norm()])?[0])
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolutionNorms {
    pub t: f64,
    pub psi: f64,
    pub psi_t: f64,
    pub psi_tt: f64,
    /// `‖ψ‖_{Ḣ^{s+4}}`.
    pub psi_high: f64,
    /// Upper-bound shape for `‖ψ‖` with unit constants.
    pub bound: f64,
}

/// Upper bound for `‖ψ(t)‖_{L²}` with all implicit constants set to one.
pub fn psi_upper_bound(data: &GaussianData, n: usize, t: f64) -> f64 {
    let tp = 1.0 + t;
    let nf = n as f64;
    let norm = |j| data.l2_l11_norm(j);
    let p = |j| data.moment(j).abs();
    let d = law_d(n, t);
    let p2_law = match n {
        1 => tp.powf(1.5),
        2 => tp * (std::f64::consts::E + t).ln().sqrt(),
        _ => law_d_tilde(n, t),
    };
    tp.powf(-0.5 - 0.25 * nf) * norm(0)
        + tp.powf(-0.25 * nf) * norm(1)
        + d * norm(2)
        + tp.powf(-0.25 * nf) * p(0)
        + d * p(1)
        + p2_law * p(2)
}

/// `‖∂ₜʲψ(t)‖_{L²}` for `j = 0, 1, 2` and `‖ψ(t)‖_{Ḣ^{s+4}}`.
pub fn solution_norms(
    params: &ModelParams,
    data: &GaussianData,
    n: usize,
    t_grid: &[f64],
    grid: &RadialGrid,
    s: f64,
) -> Result<Vec<SolutionNorms>, NormError> {
    check_time_grid(t_grid)?;
    per_time(t_grid, |t| {
        let g = grid_at(grid, n, t, flow_rate(params));
        let sums = g.integrate(Zone::All, |r| match solution_hat(params, data, r, t) {
            Ok(v) => [
                v[0].norm_sqr(),
                v[1].norm_sqr(),
                v[2].norm_sqr(),
                r.powf(2.0 * (s + 4.0)) * v[0].norm_sqr(),
            ],
            Err(_) => [f64::NAN; 4],
        })?;
        Ok(SolutionNorms {
            t,
            psi: sums[0].sqrt(),
            psi_t: sums[1].sqrt(),
            psi_tt: sums[2].sqrt(),
            psi_high: sums[3].sqrt(),
            bound: psi_upper_bound(data, n, t),
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileError {
    pub t: f64,
    pub error: f64,
    pub solution: f64,
    pub ratio: f64,
}

/// `‖ψ − J₀ψ₀ − J₁ψ₁ − J₂ψ₂‖_{L²}` against `‖ψ‖_{L²}`.
pub fn profile_error_norm(
    params: &ModelParams,
    data: &GaussianData,
    n: usize,
    t_grid: &[f64],
    grid: &RadialGrid,
) -> Result<Vec<ProfileError>, NormError> {
    if n < 3 {
        return Err(NormError::Dimension(n));
    }
    check_time_grid(t_grid)?;
    per_time(t_grid, |t| {
        let g = grid_at(grid, n, t, flow_rate(params));
        let sums = g.integrate(Zone::All, |r| {
            let h = data.hats(r);
            let (Ok(psi), Ok(j)) = (solution_hat(params, data, r, t), profiles_at(params, r, t)) else {
                return [f64::NAN; 2];
            };
            let prof = j.j[0] * h[0] + j.j[1] * h[1] + j.j[2] * h[2];
            [(psi[0] - prof).norm_sqr(), psi[0].norm_sqr()]
        })?;
        let (error, solution) = (sums[0].sqrt(), sums[1].sqrt());
        let ratio = if solution > 0.0 { error / solution } else { 0.0 };
        Ok(ProfileError {
            t,
            error,
            solution,
            ratio,
        })
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalityRow {
    pub t: f64,
    /// `‖χ_int Ĵ₂‖·|ψ̂₂(0)|`
    pub profile_term: f64,
    /// `‖χ_int(ψ̂ − Ĵ₂ψ̂₂(0))‖`
    pub correction: f64,
    pub difference: f64,
    pub solution: f64,
    /// `‖ψ‖ / (𝒟̃ₙ(t)|P_{ψ₂}|)`
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimalityLedger {
    pub rows: Vec<OptimalityRow>,
    /// First sampled time after which the lower-bound chain stays positive.
    pub onset: Option<f64>,
}

/// Evaluates the three terms of the lower-bound chain for `‖ψ(t)‖`.
pub fn optimality_probe(
    params: &ModelParams,
    data: &GaussianData,
    n: usize,
    t_grid: &[f64],
    grid: &RadialGrid,
) -> Result<OptimalityLedger, NormError> {
    if n < 3 {
        return Err(NormError::Dimension(n));
    }
    let p2 = data.moment(2);
    let scale = data.l11_norm(2).max(f64::MIN_POSITIVE);
    if !(p2.abs() > 1e-12 * scale) {
        return Err(NormError::ZeroMoment);
    }
    check_time_grid(t_grid)?;
    let p2_hat = p2 * (2.0 * PI).powf(-0.5 * n as f64);
    let rows = per_time(t_grid, |t| {
        let g = grid_at(grid, n, t, flow_rate(params));
        let inner = g.integrate(Zone::Interior, |r| {
            let (Ok(psi), Ok(j)) = (solution_hat(params, data, r, t), profiles_at(params, r, t)) else {
                return [f64::NAN; 2];
            };
            let prof = j.j[2] * p2_hat;
            [prof * prof, (psi[0] - prof).norm_sqr()]
        })?;
        let total = g.integrate(Zone::All, |r| match solution_hat(params, data, r, t) {
            Ok(v) => [v[0].norm_sqr()],
            Err(_) => [f64::NAN],
        })?;
        let profile_term = inner[0].sqrt();
        let correction = inner[1].sqrt();
        let solution = total[0].sqrt();
        Ok(OptimalityRow {
            t,
            profile_term,
            correction,
            difference: profile_term - correction,
            solution,
            ratio: solution / (law_d_tilde(n, t) * p2.abs()),
        })
    })?;
    let first_positive = match rows.iter().rposition(|r| r.difference <= 0.0) {
        Some(i) => i + 1,
        None => 0,
    };
    let onset = rows.get(first_positive).map(|r| r.t);
    Ok(OptimalityLedger { rows, onset })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KuznetsovGap {
    pub t: f64,
    pub gap: f64,
    /// `𝒟ₙ(t)⁻¹ · gap`
    pub normalized: f64,
    pub law: f64,
}

/// Distance to the viscoelastic wave with friction `δ` and the same first two data.
///
/// The third datum must be the Laplacian coupling `ψ₂ = C₀Δψ₀ + C₁Δψ₁` with `C₀C₁ ≠ 0`.
pub fn kuznetsov_gap(
    params: &ModelParams,
    data: &GaussianData,
    n: usize,
    t_grid: &[f64],
    grid: &RadialGrid,
) -> Result<Vec<KuznetsovGap>, NormError> {
    match data.psi2 {
        ThirdDatum::Laplacian { c0, c1 } if c0 * c1 != 0.0 => {}
        _ => return Err(NormError::Coupling),
    }
    check_time_grid(t_grid)?;
    let mu = params.delta();
    per_time(t_grid, |t| {
        let g = grid_at(grid, n, t, flow_rate(params));
        let sum = g.integrate(Zone::All, |r| {
            let h = data.hats(r);
            if h.iter().all(|v| *v == 0.0) {
                return [0.0];
            }
            let (Ok(psi), Ok(k)) = (solution_hat(params, data, r, t), viscoelastic_kernels(mu, r, t)) else {
                return [f64::NAN];
            };
            let phi = k.g0 * h[0] + k.g1 * h[1];
            [(psi[0] - phi).norm_sqr()]
        })?;
        let gap = sum[0].sqrt();
        Ok(KuznetsovGap {
            t,
            gap,
            normalized: gap / law_d(n, t),
            law: super::laws::law_b(n, t),
        })
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct LowDimGrowth {
    pub fit: DecayFit,
    /// `max_t ‖ψ‖ / growth(t)` with `growth = (1+t)^{3/2}` or `(1+t)ln(e+t)^{1/2}`.
    pub max_ratio: f64,
    pub slope_bound: f64,
    pub passed: bool,
}

/// Upper-bound growth check for `n ∈ {1, 2}`.
pub fn low_dim_growth(
    params: &ModelParams,
    data: &GaussianData,
    n: usize,
    t_grid: &[f64],
    grid: &RadialGrid,
) -> Result<LowDimGrowth, NormError> {
    if !(n == 1 || n == 2) {
        return Err(NormError::Dimension(n));
    }
    let norms = solution_norms(params, data, n, t_grid, grid, 0.0)?;
    let growth = |t: f64| {
        if n == 1 {
            (1.0 + t).powf(1.5)
        } else {
            (1.0 + t) * (std::f64::consts::E + t).ln().sqrt()
        }
    };
    let max_ratio = norms.iter().map(|s| s.psi / growth(s.t)).fold(0.0, f64::max);
    let slope_bound = if n == 1 { 1.55 } else { 1.05 };
    if data.is_zero() {
        let fit = DecayFit {
            t: t_grid.to_vec(),
            y: vec![0.0; t_grid.len()],
            slope: 0.0,
            intercept: f64::NEG_INFINITY,
            rms: 0.0,
            log_ratio: None,
        };
        return Ok(LowDimGrowth {
            fit,
            max_ratio,
            slope_bound,
            passed: true,
        });
    }
    let samples: Vec<(f64, f64)> = norms.iter().map(|s| (s.t, s.psi)).collect();
    let fit = fit_power_law(&samples, false)?;
    let passed = fit.slope <= slope_bound;
    Ok(LowDimGrowth {
        fit,
        max_ratio,
        slope_bound,
        passed,
    })
}

/// The four low-frequency multiplier families bounded by the norm lemma.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MultiplierFamily {
    /// `r^s e^{-cr²t}`
    Power { s: f64 },
    /// `r⁻¹|sin rt| e^{-cr²t}`
    Sine,
    /// `r⁻¹ e^{-cr²t}`, square integrable for `n ≥ 3`
    Inverse,
    /// `r⁻² sin²(rt/2) e^{-cr²t}`
    SineSquared,
}

impl MultiplierFamily {
    pub fn eval(&self, r: f64, t: f64, c: f64) -> f64 {
        let env = (-c * r * r * t).exp();
        match *self {
            Self::Power { s } => r.powf(s) * env,
            Self::Sine => (r * t).sin().abs() / r * env,
            Self::Inverse => env / r,
            Self::SineSquared => {
                let h = (0.5 * r * t).sin() / r;
                h * h * env
            }
        }
    }

    /// The printed rate function at time `t`.
    pub fn law(&self, n: usize, t: f64) -> f64 {
        let nf = n as f64;
        match *self {
            Self::Power { s } => (1.0 + t).powf(-0.5 * s - 0.25 * nf),
            Self::Sine => law_d(n, t),
            Self::Inverse => (1.0 + t).powf(0.5 - 0.25 * nf),
            Self::SineSquared => law_d_tilde(n, t),
        }
    }

    /// Exponent of the printed law, or `None` for the logarithmic branches.
    pub fn law_exponent(&self, n: usize) -> Option<f64> {
        let nf = n as f64;
        match *self {
            Self::Power { s } => Some(-0.5 * s - 0.25 * nf),
            Self::Sine if n == 2 => None,
            Self::Sine if n == 1 => Some(0.5),
            Self::Sine | Self::Inverse => Some(0.5 - 0.25 * nf),
            Self::SineSquared if n == 4 => None,
            Self::SineSquared if n <= 3 => Some(2.0 - 0.5 * nf),
            Self::SineSquared => Some(1.0 - 0.25 * nf),
        }
    }

    fn oscillates(&self) -> bool {
        matches!(self, Self::Sine | Self::SineSquared)
    }
}

/// `‖χ_{r<ε} m(r, t)‖_{L²}` for one family member.
pub fn multiplier_norm(
    family: MultiplierFamily,
    n: usize,
    c: f64,
    t: f64,
    grid: &RadialGrid,
) -> Result<f64, NormError> {
    if matches!(family, MultiplierFamily::Inverse) && n < 3 {
        return Err(NormError::Dimension(n));
    }
    let g = if grid.n == n {
        grid.clone()
    } else {
        grid.with_dimension(n)
    };
    // Uniform panels at multiples of π/t also place the kinks of |sin rt| on panel ends.
    let g = if family.oscillates() { g.adapted(t, c) } else { g };
    Ok(g.integrate(Zone::Interior, |r| [family.eval(r, t, c).powi(2)])?[0].sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::logspace;

    #[test]
    fn gaussian_multiplier_norm() {
        let g = RadialGrid::with_defaults(3).unwrap();
        let v = l2_norm_radial(|r| C::new((-0.5 * r * r).exp(), 0.0), &g, Zone::All).unwrap();
        assert!((v - PI.powf(0.75)).abs() < 1e-10);
        assert_eq!(l2_norm_radial(|_| C::new(0.0, 0.0), &g, Zone::All).unwrap(), 0.0);
    }

    #[test]
    fn zero_data_gives_zero_norms() {
        let p = ModelParams::default();
        let g = RadialGrid::with_defaults(3).unwrap();
        let rows = solution_norms(&p, &GaussianData::zero(3), 3, &[0.0, 1.0, 10.0], &g, 2.0).unwrap();
        for r in rows {
            assert_eq!((r.psi, r.psi_t, r.psi_tt, r.psi_high), (0.0, 0.0, 0.0, 0.0));
        }
    }

    #[test]
    fn initial_norms_match_data() {
        let p = ModelParams::default();
        let d = GaussianData::single(3, [(1.0, 1.0), (0.5, 0.8), (-0.3, 1.2)]).unwrap();
        let g = RadialGrid::with_defaults(3).unwrap();
        let r = solution_norms(&p, &d, 3, &[0.0], &g, 1.0).unwrap()[0];
        assert!((r.psi - d.l2_norm(0)).abs() < 1e-9 * d.l2_norm(0));
        assert!((r.psi_t - d.l2_norm(1)).abs() < 1e-9 * d.l2_norm(1));
        assert!((r.psi_tt - d.l2_norm(2)).abs() < 1e-9 * d.l2_norm(2));
        assert!((r.psi_high - d.hs_norm(0, 5.0)).abs() < 1e-8 * d.hs_norm(0, 5.0));
    }

    #[test]
    fn profile_error_vanishes_initially() {
        let p = ModelParams::default();
        let d = GaussianData::single(5, [(1.0, 1.0), (0.5, 0.8), (-0.3, 1.2)]).unwrap();
        let g = RadialGrid::with_defaults(5).unwrap();
        let e = profile_error_norm(&p, &d, 5, &[0.0], &g).unwrap()[0];
        assert_eq!(e.error, 0.0);
    }

    #[test]
    fn power_family_slope_in_time() {
        let g = RadialGrid::with_defaults(3).unwrap();
        let fam = MultiplierFamily::Power { s: 1.0 };
        let ts = logspace(1e2, 1e5, 10);
        let samples: Vec<_> = ts
            .iter()
            .map(|t| (*t, multiplier_norm(fam, 3, 10.0, *t, &g).unwrap()))
            .collect();
        let f = fit_power_law(&samples, false).unwrap();
        assert!((f.slope - fam.law_exponent(3).unwrap()).abs() < 0.03, "{}", f.slope);
    }

    #[test]
    fn optimality_rejects_zero_moment() {
        let p = ModelParams::default();
        let (s1, s2) = (1.0f64, 2.0f64);
        let d = GaussianData::new(
            5,
            vec![],
            vec![],
            ThirdDatum::Gaussian(vec![
                super::super::data::GaussTerm::new(1.0, s1),
                super::super::data::GaussTerm::new(-(s1 / s2).powi(5), s2),
            ]),
        )
        .unwrap();
        let g = RadialGrid::with_defaults(5).unwrap();
        assert!(matches!(
            optimality_probe(&p, &d, 5, &[1.0], &g),
            Err(NormError::ZeroMoment)
        ));
    }

    #[test]
    fn kuznetsov_requires_coupling() {
        let p = ModelParams::default();
        let d = GaussianData::single(3, [(1.0, 1.0), (0.5, 0.8), (-0.3, 1.2)]).unwrap();
        let g = RadialGrid::with_defaults(3).unwrap();
        assert!(kuznetsov_gap(&p, &d, 3, &[1.0], &g).is_err());
        let zero = GaussianData::zero(3).with_third(ThirdDatum::Laplacian { c0: 1.0, c1: 1.0 });
        let rows = kuznetsov_gap(&p, &zero, 3, &[1.0, 10.0], &g).unwrap();
        assert!(rows.iter().all(|r| r.gap == 0.0));
    }
}
