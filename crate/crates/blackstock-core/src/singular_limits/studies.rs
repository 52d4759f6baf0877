//! κ- and ε̄-sweeps of the expansion errors in `L²` and the `L¹`-in-ξ surrogate for `L^∞`.

use super::expansion::{consistent_third_datum, first_order_corrector, heat_layer, solve_limit_mode};
use super::LimitError;
use crate::model::{logspace, ModelParams};
use crate::phase_solver::{evolve_mode, viscoelastic_kernels};
use crate::spectral_norms::{law_g1, loglog_fit, GaussianData, GridConfig, RadialGrid, ThirdDatum, Zone};
use num_complex::Complex64;
use std::f64::consts::PI;

type C = Complex64;

/// `t = 0` followed by 40 log-spaced times in `[10⁻², 10³]`.
pub fn default_time_grid() -> Vec<f64> {
    let mut g = vec![0.0];
    g.extend(logspace(1e-2, 1e3, 40));
    g
}

/// Thermal diffusivity held fixed in the vanishing-viscosity study: the inviscid
/// damping `(γ-1)κ` then matches the top of the default ε̄ sweep.
pub const VISCOUS_STUDY_KAPPA: f64 = 0.25;

/// `ε̄ ∈ {10⁻¹, 10^{-1.5}, …, 10⁻³}`.
pub fn default_epsbar_sweep() -> Vec<f64> {
    logspace(1e-1, 1e-3, 5)
}

/// `κ ∈ {10⁻², 10^{-2.5}, …, 10⁻⁴}`.
pub fn default_kappa_sweep() -> Vec<f64> {
    logspace(1e-2, 1e-4, 5)
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub t_grid: Vec<f64>,
    pub grid: GridConfig,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            t_grid: default_time_grid(),
            grid: GridConfig::default(),
        }
    }
}

/// Rejects a third datum that is not the consistent one.
pub fn check_consistent(data: &GaussianData, params: &ModelParams) -> Result<(), LimitError> {
    let ok = match &data.psi2 {
        ThirdDatum::Gaussian(t) => t.is_empty(),
        ThirdDatum::Laplacian { c0, c1 } => {
            (c0 - 1.0).abs() <= 1e-12 && (c1 - params.bnu()).abs() <= 1e-12 * params.bnu().max(1.0)
        }
    };
    if ok {
        Ok(())
    } else {
        Err(LimitError::Inconsistent)
    }
}

fn check_sweep(values: &[f64], what: &'static str) -> Result<(), LimitError> {
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, 0.0f64), |a, v| (a.0.min(*v), a.1.max(*v)));
    if values.len() < 2 || !(lo > 0.0) || hi / lo < 100.0 * (1.0 - 1e-12) {
        return Err(LimitError::Sweep(what));
    }
    Ok(())
}

/// `(2π)^{-n/2}`, the factor of the Hausdorff–Young bound `‖g‖_∞ ≤ (2π)^{-n/2}‖ĝ‖_{L¹}`.
pub fn linf_factor(n: usize) -> f64 {
    (2.0 * PI).powf(-0.5 * n as f64)
}

/// Supremum over the sampled times, with the time where it is attained.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupValue {
    pub value: f64,
    pub at: f64,
}

impl SupValue {
    fn new() -> Self {
        Self { value: 0.0, at: 0.0 }
    }
    fn push(&mut self, t: f64, v: f64) {
        if v > self.value {
            self.value = v;
            self.at = t;
        }
    }
}

/// Errors of one κ in a sweep; each field is a supremum over time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KappaRow {
    pub kappa: f64,
    /// `‖u‖_{L²}/𝒢₁` with `u = ψ - ψ⁽⁰⁾`.
    pub u_l2: SupValue,
    pub ut_l2: SupValue,
    /// `‖u_tt - bνΔu_t - ½Δu‖_{L²}`
    pub energy_l2: SupValue,
    pub u_linf: SupValue,
    pub ut_linf: SupValue,
    pub energy_linf: SupValue,
    /// `κ²R` in `L²` and the `L^∞` surrogate; zero unless second order was requested.
    pub remainder_l2: SupValue,
    pub remainder_linf: SupValue,
}

impl KappaRow {
    fn new(kappa: f64) -> Self {
        let z = SupValue::new();
        Self {
            kappa,
            u_l2: z,
            ut_l2: z,
            energy_l2: z,
            u_linf: z,
            ut_linf: z,
            energy_linf: z,
            remainder_l2: z,
            remainder_linf: z,
        }
    }

    fn sups(&self) -> [SupValue; 8] {
        [
            self.u_l2,
            self.ut_l2,
            self.energy_l2,
            self.u_linf,
            self.ut_linf,
            self.energy_linf,
            self.remainder_l2,
            self.remainder_linf,
        ]
    }
}

const PER_KAPPA: usize = 8;

/// Accumulates one time slice of the sweep into `rows`.
fn sweep_slice(
    data: &GaussianData,
    params: &ModelParams,
    n: usize,
    rows: &mut [KappaRow],
    t: f64,
    grid: &RadialGrid,
    second_order: bool,
) -> Result<(), LimitError> {
    let bnu = params.bnu();
    let per_kappa: Vec<ModelParams> = rows
        .iter()
        .map(|r| params.with_kappa(r.kappa))
        .collect::<Result<_, _>>()?;
    let g = grid.adapted(t, 0.5 * bnu);
    let m = rows.len();
    let sums = g.integrate_dyn(Zone::All, PER_KAPPA * m, |r| {
        let mut out = vec![0.0; PER_KAPPA * m];
        let (a, b) = (data.hat(0, r), data.hat(1, r));
        if a == 0.0 && b == 0.0 {
            return Ok(out);
        }
        let mut run = || -> Result<(), LimitError> {
            let k = viscoelastic_kernels(bnu, r, t)?;
            let v = k.g0 * a + k.g1 * b;
            let dv = k.dg0 * a + k.dg1 * b;
            let ddv = -r * r * v - bnu * r * r * dv;
            let corr = if second_order {
                first_order_corrector(a, b, params, r, t)?
            } else {
                0.0
            };
            for (i, p) in per_kappa.iter().enumerate() {
                let c2 = consistent_third_datum(a, b, p, r);
                let y = evolve_mode(p, [C::new(a, 0.0), C::new(b, 0.0), C::new(c2, 0.0)], r, t)?;
                let u = y[0].re - v;
                let ut = y[1].re - dv;
                let utt = y[2].re - ddv;
                let en = utt + bnu * r * r * ut + 0.5 * r * r * u;
                let rem = if second_order {
                    let kappa = p.kappa();
                    y[0].re - v - kappa * corr - kappa * heat_layer(a, b, p, r, kappa * t)?
                } else {
                    0.0
                };
                let o = &mut out[PER_KAPPA * i..PER_KAPPA * (i + 1)];
                o.copy_from_slice(&[
                    u * u,
                    ut * ut,
                    en * en,
                    u.abs(),
                    ut.abs(),
                    en.abs(),
                    rem * rem,
                    rem.abs(),
                ]);
            }
            Ok(())
        };
        run().map_err(|e| crate::spectral_norms::NormError::BadData(format!("r = {r}, t = {t}: {e}")))?;
        Ok(out)
    })?;
    let hy = linf_factor(n);
    let g1 = law_g1(n, t);
    for (i, row) in rows.iter_mut().enumerate() {
        let s = &sums[PER_KAPPA * i..PER_KAPPA * (i + 1)];
        row.u_l2.push(t, s[0].sqrt() / g1);
        row.ut_l2.push(t, s[1].sqrt());
        row.energy_l2.push(t, s[2].sqrt());
        row.u_linf.push(t, hy * s[3]);
        row.ut_linf.push(t, hy * s[4]);
        row.energy_linf.push(t, hy * s[5]);
        row.remainder_l2.push(t, s[6].sqrt());
        row.remainder_linf.push(t, hy * s[7]);
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct KappaSweep {
    pub n: usize,
    pub rows: Vec<KappaRow>,
    pub t_grid: Vec<f64>,
    /// Set when some supremum is still attained at the last time after one extension.
    pub edge_maximizer: bool,
}

fn kappa_sweep(
    data: &GaussianData,
    params_base: &ModelParams,
    n: usize,
    kappas: &[f64],
    config: &SweepConfig,
    second_order: bool,
) -> Result<KappaSweep, LimitError> {
    check_consistent(data, params_base)?;
    check_sweep(kappas, "kappa")?;
    if data.n != n {
        return Err(LimitError::Dimension(n));
    }
    let grid = RadialGrid::new(n, config.grid)?;
    let mut rows: Vec<KappaRow> = kappas.iter().map(|k| KappaRow::new(*k)).collect();
    let mut t_grid = config.t_grid.clone();
    for t in &t_grid {
        sweep_slice(data, params_base, n, &mut rows, *t, &grid, second_order)?;
    }
    let at_edge = |rows: &[KappaRow], t_end: f64| {
        rows.iter()
            .any(|r| r.sups().iter().any(|s| s.value > 0.0 && s.at == t_end))
    };
    let mut t_end = *t_grid.last().ok_or(LimitError::Sweep("time grid"))?;
    if at_edge(&rows, t_end) {
        let extra: Vec<f64> = logspace(t_end, 10.0 * t_end, 6).into_iter().skip(1).collect();
        for t in &extra {
            sweep_slice(data, params_base, n, &mut rows, *t, &grid, second_order)?;
        }
        t_grid.extend(extra);
        t_end = *t_grid.last().expect("non-empty grid");
    }
    let edge_maximizer = at_edge(&rows, t_end);
    Ok(KappaSweep {
        n,
        rows,
        t_grid,
        edge_maximizer,
    })
}

/// Log–log slope and intercept of an error against κ (or ε̄).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub rms: f64,
}

fn rate_fit(x: &[f64], y: &[f64]) -> Result<RateFit, LimitError> {
    let (slope, intercept, rms) = loglog_fit(x, y)?;
    Ok(RateFit { slope, intercept, rms })
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderStudy {
    pub sweep: KappaSweep,
    pub u_l2: RateFit,
    pub ut_l2: RateFit,
    pub energy_l2: RateFit,
    pub u_linf: RateFit,
    pub ut_linf: RateFit,
    pub energy_linf: RateFit,
}

/// κ-slopes of `ψ - ψ⁽⁰⁾` in the norms of the first-order convergence results.
pub fn first_order_rate_study(
    data: &GaussianData,
    params_base: &ModelParams,
    n: usize,
    kappas: &[f64],
    config: &SweepConfig,
) -> Result<FirstOrderStudy, LimitError> {
    let sweep = kappa_sweep(data, params_base, n, kappas, config, false)?;
    if sweep.rows.iter().all(|r| r.u_l2.value == 0.0) {
        return Err(LimitError::ZeroData);
    }
    let k: Vec<f64> = sweep.rows.iter().map(|r| r.kappa).collect();
    let col = |f: fn(&KappaRow) -> SupValue| -> Vec<f64> { sweep.rows.iter().map(|r| f(r).value).collect() };
    Ok(FirstOrderStudy {
        u_l2: rate_fit(&k, &col(|r| r.u_l2))?,
        ut_l2: rate_fit(&k, &col(|r| r.ut_l2))?,
        energy_l2: rate_fit(&k, &col(|r| r.energy_l2))?,
        u_linf: rate_fit(&k, &col(|r| r.u_linf))?,
        ut_linf: rate_fit(&k, &col(|r| r.ut_linf))?,
        energy_linf: rate_fit(&k, &col(|r| r.energy_linf))?,
        sweep,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderStudy {
    pub sweep: KappaSweep,
    pub remainder_l2: RateFit,
    pub remainder_linf: RateFit,
    /// `sup‖κ²R‖_{L²} / sup‖ψ - ψ⁽⁰⁾‖_{L²}` per κ.
    pub ratio: Vec<f64>,
    pub ratio_fit: RateFit,
}

/// κ-slope of the remainder after subtracting corrector and layer.
pub fn second_order_rate_study(
    data: &GaussianData,
    params_base: &ModelParams,
    n: usize,
    kappas: &[f64],
    config: &SweepConfig,
) -> Result<SecondOrderStudy, LimitError> {
    if n < 2 {
        return Err(LimitError::Dimension(n));
    }
    let sweep = kappa_sweep(data, params_base, n, kappas, config, true)?;
    if sweep.rows.iter().all(|r| r.remainder_l2.value == 0.0) {
        return Err(LimitError::ZeroData);
    }
    let k: Vec<f64> = sweep.rows.iter().map(|r| r.kappa).collect();
    let rem: Vec<f64> = sweep.rows.iter().map(|r| r.remainder_l2.value).collect();
    let rem_inf: Vec<f64> = sweep.rows.iter().map(|r| r.remainder_linf.value).collect();
    let ratio: Vec<f64> = sweep
        .rows
        .iter()
        .map(|r| r.remainder_l2.value / (r.u_l2.value * law_g1(n, r.u_l2.at)))
        .collect();
    Ok(SecondOrderStudy {
        remainder_l2: rate_fit(&k, &rem)?,
        remainder_linf: rate_fit(&k, &rem_inf)?,
        ratio_fit: rate_fit(&k, &ratio)?,
        ratio,
        sweep,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViscousRow {
    pub epsbar: f64,
    pub l2: SupValue,
    pub linf: SupValue,
    pub dt_linf: SupValue,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ViscousLimitStudy {
    pub rows: Vec<ViscousRow>,
    /// Fit of the `L^∞` surrogate over the positive ε̄; advisory.
    pub fit: RateFit,
    /// Errors decrease with ε̄ along the sweep.
    pub monotone: bool,
}

/// Distance between the viscous model with `bν = ε̄` and the inviscid one, same data.
pub fn viscous_limit_study(
    data: &GaussianData,
    params_base: &ModelParams,
    n: usize,
    epsbar: &[f64],
    config: &SweepConfig,
) -> Result<ViscousLimitStudy, LimitError> {
    if data.n != n {
        return Err(LimitError::Dimension(n));
    }
    let positive: Vec<f64> = epsbar.iter().copied().filter(|e| *e > 0.0).collect();
    check_sweep(&positive, "epsbar")?;
    if epsbar.iter().any(|e| !(*e >= 0.0)) {
        return Err(LimitError::Sweep("epsbar"));
    }
    let inviscid = params_base.with_inviscid(true);
    let viscous: Vec<Option<ModelParams>> = epsbar
        .iter()
        .map(|e| {
            if *e > 0.0 {
                params_base.with_inviscid(false).with_bnu(*e).map(Some)
            } else {
                Ok(None)
            }
        })
        .collect::<Result<_, _>>()?;
    let grid = RadialGrid::new(n, config.grid)?;
    let mut rows: Vec<ViscousRow> = epsbar
        .iter()
        .map(|e| ViscousRow {
            epsbar: *e,
            l2: SupValue::new(),
            linf: SupValue::new(),
            dt_linf: SupValue::new(),
        })
        .collect();
    let m = rows.len();
    let hy = linf_factor(n);
    let rate = 0.5 * (params_base.gamma() - 1.0) * params_base.kappa();
    for t in &config.t_grid {
        let g = grid.adapted(*t, rate);
        let sums = g.integrate_dyn(Zone::All, 3 * m, |r| {
            let mut out = vec![0.0; 3 * m];
            let h = data.hats(r);
            if h.iter().all(|v| *v == 0.0) {
                return Ok(out);
            }
            let d = h.map(|v| C::new(v, 0.0));
            let err = |e: crate::phase_solver::PhaseError| {
                crate::spectral_norms::NormError::BadData(format!("r = {r}, t = {t}: {e}"))
            };
            let phi = evolve_mode(&inviscid, d, r, *t).map_err(err)?;
            for (i, p) in viscous.iter().enumerate() {
                let Some(p) = p else { continue };
                let psi = evolve_mode(p, d, r, *t).map_err(err)?;
                let (e0, e1) = ((psi[0] - phi[0]).norm(), (psi[1] - phi[1]).norm());
                out[3 * i..3 * i + 3].copy_from_slice(&[e0 * e0, e0, e1]);
            }
            Ok(out)
        })?;
        for (i, row) in rows.iter_mut().enumerate() {
            row.l2.push(*t, sums[3 * i].sqrt());
            row.linf.push(*t, hy * sums[3 * i + 1]);
            row.dt_linf.push(*t, hy * sums[3 * i + 2]);
        }
    }
    let pos: Vec<&ViscousRow> = rows.iter().filter(|r| r.epsbar > 0.0).collect();
    let e: Vec<f64> = pos.iter().map(|r| r.epsbar).collect();
    let y: Vec<f64> = pos.iter().map(|r| r.linf.value).collect();
    let fit = rate_fit(&e, &y)?;
    let mut sorted: Vec<&ViscousRow> = rows.iter().collect();
    sorted.sort_by(|a, b| a.epsbar.total_cmp(&b.epsbar));
    let monotone = sorted.windows(2).all(|w| w[0].linf.value <= w[1].linf.value);
    Ok(ViscousLimitStudy { rows, fit, monotone })
}

/// Pointwise envelope `|r³ψ̂⁽⁰⁾| ≤ C e^{-c r²t/(1+r²)}(r³|ψ̂₀| + r²|ψ̂₁|)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvelopeFit {
    pub c_const: f64,
    pub c_rate: f64,
}

/// Fits the envelope of the limit solution on a sample of `(r, t)`.
///
/// `c` is taken as half the smallest sampled decay rate of the slow root, after
/// which `C` is the largest observed ratio.
pub fn limit_envelope_fit(
    psi0: f64,
    psi1: f64,
    params: &ModelParams,
    r_grid: &[f64],
    t_grid: &[f64],
) -> Result<EnvelopeFit, LimitError> {
    let mu = params.bnu();
    let mut rate = f64::INFINITY;
    for r in r_grid {
        let k = viscoelastic_kernels(mu, *r, 0.0)?;
        let slow = -k.rho_plus.re.max(k.rho_minus.re);
        rate = rate.min(slow * (1.0 + r * r) / (r * r));
    }
    let c_rate = 0.5 * rate;
    let mut c_const = 0.0f64;
    for r in r_grid {
        for t in t_grid {
            let (v, _) = solve_limit_mode(psi0, psi1, params, *r, *t)?;
            let env = (-c_rate * r * r * t / (1.0 + r * r)).exp() * (r.powi(3) * psi0.abs() + r * r * psi1.abs());
            if env > 0.0 {
                c_const = c_const.max(r.powi(3) * v.abs() / env);
            }
        }
    }
    Ok(EnvelopeFit { c_const, c_rate })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn limit_data(n: usize, p: &ModelParams) -> GaussianData {
        GaussianData::single(n, [(1.0, 1.0), (0.5, 1.0), (0.0, 1.0)])
            .unwrap()
            .with_third(ThirdDatum::Laplacian { c0: 1.0, c1: p.bnu() })
    }

    fn short() -> SweepConfig {
        let mut t = vec![0.0];
        t.extend(logspace(1e-2, 1e2, 12));
        SweepConfig {
            t_grid: t,
            grid: GridConfig::default(),
        }
    }

    #[test]
    fn zero_data_vanishes() {
        let p = ModelParams::default();
        let d = GaussianData::zero(3);
        assert!(matches!(
            first_order_rate_study(&d, &p, 3, &default_kappa_sweep(), &short()),
            Err(LimitError::ZeroData)
        ));
    }

    #[test]
    fn inconsistent_datum_rejected() {
        let p = ModelParams::default();
        let d = GaussianData::single(3, [(1.0, 1.0), (0.5, 1.0), (0.2, 1.0)]).unwrap();
        assert!(matches!(
            first_order_rate_study(&d, &p, 3, &default_kappa_sweep(), &short()),
            Err(LimitError::Inconsistent)
        ));
        let wrong = d.with_third(ThirdDatum::Laplacian { c0: 1.0, c1: 1.0 });
        assert!(check_consistent(&wrong, &p).is_err());
    }

    #[test]
    fn sweep_needs_two_decades() {
        let p = ModelParams::default();
        let d = limit_data(3, &p);
        assert!(first_order_rate_study(&d, &p, 3, &[1e-2, 1e-3], &short()).is_err());
    }

    #[test]
    fn first_order_errors_shrink_with_kappa() {
        let p = ModelParams::default();
        let d = limit_data(3, &p);
        let s = first_order_rate_study(&d, &p, 3, &default_kappa_sweep(), &short()).unwrap();
        assert!(s.u_l2.slope > 0.4 && s.energy_l2.slope > 0.4 && s.u_linf.slope > 0.4);
        assert!(s.sweep.rows.windows(2).all(|w| w[1].u_l2.value < w[0].u_l2.value));
    }

    #[test]
    fn remainder_beats_first_order() {
        let p = ModelParams::default();
        let d = limit_data(3, &p);
        let s = second_order_rate_study(&d, &p, 3, &default_kappa_sweep(), &short()).unwrap();
        assert!(s.remainder_l2.slope > 1.4, "{}", s.remainder_l2.slope);
        assert!(s.ratio.iter().all(|q| *q < 1.0));
    }

    #[test]
    fn hausdorff_young_is_sharp_for_gaussians() {
        for n in [1, 3, 5] {
            let d = GaussianData::single(n, [(2.0, 0.7), (0.0, 1.0), (0.0, 1.0)]).unwrap();
            let g = RadialGrid::with_defaults(n).unwrap();
            let l1 = g.integrate(Zone::All, |r| [d.hat(0, r).abs()]).unwrap()[0];
            assert!((linf_factor(n) * l1 - 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn envelope_constant_is_finite() {
        let p = ModelParams::default();
        let f = limit_envelope_fit(0.8, -0.3, &p, &logspace(1e-2, 30.0, 25), &logspace(1e-2, 1e3, 25)).unwrap();
        assert!(f.c_rate > 0.0 && f.c_const.is_finite() && f.c_const < 100.0, "{f:?}");
    }

    #[test]
    fn viscous_limit_zero_friction_and_monotone() {
        let p = ModelParams::default().with_kappa(VISCOUS_STUDY_KAPPA).unwrap();
        let d = GaussianData::single(3, [(1.0, 1.0), (0.5, 1.0), (-0.3, 1.0)]).unwrap();
        let s = viscous_limit_study(&d, &p, 3, &[0.0, 1e-3, 1e-2, 1e-1], &short()).unwrap();
        assert_eq!(s.rows[0].linf.value, 0.0);
        assert!(s.monotone);
        assert!(s.fit.slope > 0.8, "{}", s.fit.slope);
    }
}
