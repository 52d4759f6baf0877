//! Per-mode terms of the small-diffusivity expansion.

use super::LimitError;
use crate::model::ModelParams;
use crate::phase_solver::{evolve_mode, viscoelastic_kernels};
use crate::quad::adaptive_gk_real;
use num_complex::Complex64;

type C = Complex64;

const DUHAMEL_ABS_TOL: f64 = 1e-10;
const DUHAMEL_MAX_INTERVALS: usize = 20_000;

/// `ψ̂₂ = -r²(bν ψ̂₁ + ψ̂₀)`, the third datum compatible with the limit equation.
pub fn consistent_third_datum(psi0: f64, psi1: f64, params: &ModelParams, r: f64) -> f64 {
    -r * r * (params.bnu() * psi1 + psi0)
}

/// `J̃ = ψ̂₁ + bν r² ψ̂₀`.
pub fn layer_source(psi0: f64, psi1: f64, params: &ModelParams, r: f64) -> f64 {
    psi1 + params.bnu() * r * r * psi0
}

/// `(ψ̂⁽⁰⁾, ∂ₜψ̂⁽⁰⁾)` for the viscoelastic limit with friction `bν`.
pub fn solve_limit_mode(psi0: f64, psi1: f64, params: &ModelParams, r: f64, t: f64) -> Result<(f64, f64), LimitError> {
    let g = viscoelastic_kernels(params.bnu(), r, t)?;
    Ok((g.g0 * psi0 + g.g1 * psi1, g.dg0 * psi0 + g.dg1 * psi1))
}

/// `ψ̂^{I,1}(t)`: the homogeneous part `(1-γ)Ĝ₀ J̃` plus the Duhamel integral
/// `(1-γ) r² ∫₀ᵗ Ĝ₁(t-s) [(bν r² Ĝ₀(s) - r² Ĝ₁(s)) ψ̂₀ + Ĝ₀(s) ψ̂₁] ds`.
pub fn first_order_corrector(psi0: f64, psi1: f64, params: &ModelParams, r: f64, t: f64) -> Result<f64, LimitError> {
    let mu = params.bnu();
    let g = viscoelastic_kernels(mu, r, t)?;
    let factor = 1.0 - params.gamma();
    let hom = factor * g.g0 * layer_source(psi0, psi1, params, r);
    if t == 0.0 || (psi0 == 0.0 && psi1 == 0.0) {
        return Ok(hom);
    }
    let r2 = r * r;
    let integrand = |s: f64| {
        let (Ok(a), Ok(b)) = (viscoelastic_kernels(mu, r, t - s), viscoelastic_kernels(mu, r, s)) else {
            return f64::NAN;
        };
        a.g1 * ((mu * r2 * b.g0 - r2 * b.g1) * psi0 + b.g0 * psi1)
    };
    let duh = adaptive_gk_real(integrand, 0.0, t, DUHAMEL_ABS_TOL, 0.0, DUHAMEL_MAX_INTERVALS).map_err(|e| {
        LimitError::Quadrature {
            r,
            t,
            estimate: e.estimate,
        }
    })?;
    if !duh.is_finite() {
        return Err(LimitError::Quadrature {
            r,
            t,
            estimate: f64::NAN,
        });
    }
    Ok(hom + factor * r2 * duh)
}

/// `ψ̂^{L,1}(z) = e^{-r²z}(γ-1)J̃`; callers pass `z = κt`.
pub fn heat_layer(psi0: f64, psi1: f64, params: &ModelParams, r: f64, z: f64) -> Result<f64, LimitError> {
    if !(z >= 0.0) || !z.is_finite() {
        return Err(LimitError::BadTime(z));
    }
    Ok((-r * r * z).exp() * (params.gamma() - 1.0) * layer_source(psi0, psi1, params, r))
}

/// All expansion terms at one `(r, t)` for consistent data `(ψ̂₀, ψ̂₁)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExpansionTerms {
    pub r: f64,
    pub t: f64,
    pub psi: f64,
    pub limit: f64,
    pub corrector: f64,
    /// `ψ̂^{L,1}` at `z = κt`.
    pub layer: f64,
    /// `κ²R̂ = ψ̂ - ψ̂⁽⁰⁾ - κψ̂^{I,1} - κψ̂^{L,1}`.
    pub remainder: f64,
}

pub fn expansion_terms(
    psi0: f64,
    psi1: f64,
    params: &ModelParams,
    r: f64,
    t: f64,
) -> Result<ExpansionTerms, LimitError> {
    let kappa = params.kappa();
    let psi2 = consistent_third_datum(psi0, psi1, params, r);
    let psi = evolve_mode(params, [C::new(psi0, 0.0), C::new(psi1, 0.0), C::new(psi2, 0.0)], r, t)?[0].re;
    let (limit, _) = solve_limit_mode(psi0, psi1, params, r, t)?;
    let corrector = first_order_corrector(psi0, psi1, params, r, t)?;
    let layer = heat_layer(psi0, psi1, params, r, kappa * t)?;
    Ok(ExpansionTerms {
        r,
        t,
        psi,
        limit,
        corrector,
        layer,
        remainder: psi - limit - kappa * corrector - kappa * layer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_solver::LinearModeOde;

    fn c(x: f64) -> C {
        C::new(x, 0.0)
    }

    #[test]
    fn consistency_removes_initial_residual() {
        let p = ModelParams::default();
        assert_eq!(consistent_third_datum(0.0, 0.0, &p, 1.0), 0.0);
        let (a, b) = (0.7, -0.4);
        let d2 = consistent_third_datum(a, b, &p, 1.0);
        assert!((d2 + (4.0 / 3.0 * b + a)).abs() < 1e-15);
        for r in [0.1, 1.0, 5.0] {
            let d2 = consistent_third_datum(a, b, &p, r);
            assert!((d2 + r * r * a + p.bnu() * r * r * b).abs() < 1e-13);
        }
    }

    #[test]
    fn limit_mode_matches_oracle() {
        let p = ModelParams::default();
        let grid = [0.0, 0.3, 2.0, 9.0, 40.0];
        for r in [0.05, 0.5, 1.5, 3.0, 8.0] {
            let mu = p.bnu();
            let ode = LinearModeOde::new(vec![r * r, mu * r * r], r);
            let traj = ode.solve(&[c(0.8), c(-0.3)], None, &grid, false).unwrap();
            for (t, want) in grid.iter().zip(&traj) {
                let (v, dv) = solve_limit_mode(0.8, -0.3, &p, r, *t).unwrap();
                assert!((v - want[0].re).abs() < 1e-8 * (1.0 + want[0].re.abs()), "r={r} t={t}");
                assert!((dv - want[1].re).abs() < 1e-8 * (1.0 + want[1].re.abs()));
            }
        }
        assert_eq!(solve_limit_mode(0.8, -0.3, &p, 1.0, 0.0).unwrap(), (0.8, -0.3));
    }

    #[test]
    fn corrector_initial_values() {
        let p = ModelParams::default();
        let (a, b, r) = (0.6, 0.9, 0.8);
        let want = (1.0 - p.gamma()) * (b + p.bnu() * r * r * a);
        assert!((first_order_corrector(a, b, &p, r, 0.0).unwrap() - want).abs() < 1e-15);
        // ∂ₜ²ψ̂^{I,1}(0) also vanishes, so the one-sided quotient is second order.
        let h = 1e-3;
        let slope = (first_order_corrector(a, b, &p, r, h).unwrap() - want) / h;
        assert!(slope.abs() < 1e-6, "{slope}");
    }

    #[test]
    fn corrector_matches_forced_oracle() {
        let p = ModelParams::default();
        let (a, b) = (0.6, 0.9);
        let grid = [0.0, 0.5, 3.0, 12.0, 30.0];
        for r in [0.1, 0.7, 1.5, 1.6, 4.0] {
            let mu = p.bnu();
            let g = p.gamma();
            let forcing = move |s: f64| {
                let (v, dv) = solve_limit_mode(a, b, &p, r, s).unwrap();
                c((g - 1.0) * -r * r * (dv + mu * r * r * v))
            };
            let ode = LinearModeOde::new(vec![r * r, mu * r * r], r);
            let init = (1.0 - g) * layer_source(a, b, &p, r);
            let traj = ode.solve(&[c(init), c(0.0)], Some(&forcing), &grid, false).unwrap();
            for (t, want) in grid.iter().zip(&traj) {
                let got = first_order_corrector(a, b, &p, r, *t).unwrap();
                assert!(
                    (got - want[0].re).abs() < 1e-7 * (1.0 + want[0].re.abs()),
                    "r={r} t={t}: {got} vs {}",
                    want[0].re
                );
            }
        }
    }

    #[test]
    fn corrector_low_frequency_bound() {
        let p = ModelParams::default();
        let (a, b) = (0.6, 0.9);
        let c = 0.25 * p.bnu();
        let mut worst = 0.0f64;
        for r in crate::model::logspace(1e-2, 1.0 / p.bnu(), 15) {
            for t in crate::model::logspace(1e-2, 1e3, 15) {
                let v = first_order_corrector(a, b, &p, r, t).unwrap();
                let env = (-c * r * r * t).exp() * (a.abs() + (1.0 + t).sqrt() * b.abs());
                worst = worst.max(v.abs() / env);
            }
        }
        assert!(worst < 10.0, "{worst}");
    }

    #[test]
    fn layer_values() {
        let p = ModelParams::default();
        let d = heat_layer(0.5, 0.2, &p, 1.0, 0.0).unwrap();
        assert!((d - 0.4 * (0.2 + p.bnu() * 0.5)).abs() < 1e-15);
        let e = heat_layer(0.5, 0.2, &p, 1.0, 1.0).unwrap();
        assert!((e - d / std::f64::consts::E).abs() < 1e-15);
        assert!(heat_layer(0.5, 0.2, &p, 1.0, -1.0).is_err());
    }

    #[test]
    fn remainder_identity_is_exact() {
        let p = ModelParams::default().with_kappa(1e-3).unwrap();
        let e = expansion_terms(0.6, 0.9, &p, 0.9, 4.0).unwrap();
        let k = p.kappa();
        assert_eq!(e.remainder, e.psi - e.limit - k * e.corrector - k * e.layer);
        assert!(e.remainder.abs() < 1e-3);
        let z = expansion_terms(0.6, 0.9, &p, 0.9, 0.0).unwrap();
        assert!(z.remainder.abs() < 1e-15);
    }
}
