//! Large-time profile multipliers `Ĵ₀, Ĵ₁, Ĵ₂`.

use super::PhaseError;
use crate::model::ModelParams;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileTriple {
    pub r: f64,
    pub t: f64,
    pub j: [f64; 3],
}

/// Heat, damped-wave and mixed profiles at `(r, t)`.
///
/// `Ĵ₂ = r⁻²e^{-κr²t}(1 - e^{(κ-δ/2)r²t}) + 2r⁻²sin²(rt/2)e^{-δr²t/2}`, which is
/// the same function as `(e^{-κr²t} - cos(rt)e^{-δr²t/2})/r²` without the
/// cancellation at small `r²t`.
pub fn profiles_at(params: &ModelParams, r: f64, t: f64) -> Result<ProfileTriple, PhaseError> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(PhaseError::NegativeTime(t));
    }
    if r == 0.0 {
        return Err(PhaseError::ZeroFrequency("J2"));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(PhaseError::BadFrequency(r));
    }
    let (kappa, delta) = (params.kappa(), params.delta());
    let r2t = r * r * t;
    let heat = (-kappa * r2t).exp();
    let wave_damp = (-0.5 * delta * r2t).exp();
    let j0 = heat;
    let j1 = (r * t).sin() / r * wave_damp;
    let half = (0.5 * r * t).sin();
    let j2 = (heat * -((kappa - 0.5 * delta) * r2t).exp_m1() + 2.0 * half * half * wave_damp) / (r * r);
    Ok(ProfileTriple { r, t, j: [j0, j1, j2] })
}

/// The `r → 0` limit of `Ĵ₂`, namely `(δ/2 - κ)t + t²/2`.
pub fn j2_zero_limit(params: &ModelParams, t: f64) -> f64 {
    (0.5 * params.delta() - params.kappa()) * t + 0.5 * t * t
}
