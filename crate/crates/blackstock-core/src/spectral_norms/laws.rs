//! The dimension-dependent rate functions `𝒟ₙ, 𝒟̃ₙ, 𝒢₁, ℬₙ`.
//!
//! `𝒟ₙ, 𝒟̃ₙ, 𝒢₁` are written as functions of `1+t` and are evaluated here at
//! time `t`; `ℬₙ` is a function of `t` itself.

use super::NormError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayLaws {
    pub d: f64,
    pub d_tilde: f64,
    pub g1: f64,
    pub b: f64,
}

fn log_root(t: f64) -> f64 {
    (std::f64::consts::E + t).ln().sqrt()
}

pub fn law_d(n: usize, t: f64) -> f64 {
    match n {
        1 => (1.0 + t).sqrt(),
        2 => log_root(t),
        _ => (1.0 + t).powf(0.5 - 0.25 * n as f64),
    }
}

pub fn law_d_tilde(n: usize, t: f64) -> f64 {
    match n {
        1..=3 => (1.0 + t).powf(2.0 - 0.5 * n as f64),
        4 => log_root(t),
        _ => (1.0 + t).powf(1.0 - 0.25 * n as f64),
    }
}

pub fn law_g1(n: usize, t: f64) -> f64 {
    match n {
        1 => (1.0 + t).powf(0.25),
        2 => log_root(t),
        _ => 1.0,
    }
}

/// `ℬₙ(t)`; the `n = 2` branch is only positive for `t > 1`.
pub fn law_b(n: usize, t: f64) -> f64 {
    match n {
        1 => t.powf(-0.75),
        2 => (t * t.ln()).powf(-0.5),
        _ => t.powf(-0.5),
    }
}

pub fn decay_laws(n: usize, t: f64) -> Result<DecayLaws, NormError> {
    if n == 0 {
        return Err(NormError::Dimension(n));
    }
    if !(t > 0.0) {
        return Err(NormError::BadTime(t));
    }
    Ok(DecayLaws {
        d: law_d(n, t),
        d_tilde: law_d_tilde(n, t),
        g1: law_g1(n, t),
        b: law_b(n, t),
    })
}
