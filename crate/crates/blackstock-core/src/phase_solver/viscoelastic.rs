//! Kernels of the viscoelastic damped wave `ψ_tt + μr²ψ_t + r²ψ = 0`.

use super::PhaseError;
use num_complex::Complex64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ViscoelasticKernel {
    pub mu: f64,
    pub r: f64,
    pub t: f64,
    pub g0: f64,
    pub g1: f64,
    pub dg0: f64,
    pub dg1: f64,
    /// `ρ₊` (the slower root when real).
    pub rho_plus: Complex64,
    pub rho_minus: Complex64,
}

fn sinc_t(beta: f64, t: f64) -> f64 {
    let x = beta * t;
    if x.abs() < 1e-4 {
        t * (1.0 - x * x / 6.0 * (1.0 - x * x / 20.0))
    } else {
        x.sin() / beta
    }
}

/// `G₀, G₁` with `G₀(0)=1, G₀'(0)=0, G₁(0)=0, G₁'(0)=1`.
///
/// Underdamped frequencies `μr < 2` use the trigonometric form and overdamped
/// ones the hyperbolic form written around the slow root `ρ₊ = r²/ρ₋`; the
/// critical frequency is the common limit of both.
pub fn viscoelastic_kernels(mu: f64, r: f64, t: f64) -> Result<ViscoelasticKernel, PhaseError> {
    if !(mu > 0.0) || !mu.is_finite() {
        return Err(PhaseError::BadFriction(mu));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(PhaseError::BadFrequency(r));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(PhaseError::NegativeTime(t));
    }
    let alpha = 0.5 * mu * r * r;
    let mr = mu * r;
    // 4 - μ²r² factored to keep the critical frequency exact.
    let disc = (2.0 - mr) * (2.0 + mr);
    let beta = 0.5 * r * disc.abs().sqrt();
    if disc >= 0.0 {
        let damp = (-alpha * t).exp();
        let s = sinc_t(beta, t);
        let c = (beta * t).cos();
        Ok(ViscoelasticKernel {
            mu,
            r,
            t,
            g0: damp * (c + alpha * s),
            g1: damp * s,
            dg0: -(alpha * alpha + beta * beta) * damp * s,
            dg1: damp * (c - alpha * s),
            rho_plus: Complex64::new(-alpha, beta),
            rho_minus: Complex64::new(-alpha, -beta),
        })
    } else {
        let rm = -alpha - beta;
        let rp = r * r / rm;
        let q = if beta * t == 0.0 {
            t
        } else {
            -(-2.0 * beta * t).exp_m1() / (2.0 * beta)
        };
        let slow = (rp * t).exp();
        Ok(ViscoelasticKernel {
            mu,
            r,
            t,
            g0: slow * (1.0 - rp * q),
            g1: slow * q,
            dg0: -rp * rm * slow * q,
            dg1: slow * (1.0 + rm * q),
            rho_plus: Complex64::new(rp, 0.0),
            rho_minus: Complex64::new(rm, 0.0),
        })
    }
}
