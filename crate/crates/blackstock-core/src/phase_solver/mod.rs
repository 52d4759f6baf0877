//! Exact propagation of a single Fourier mode of the third-order equation,
//! plus the large-time profiles, the damped-wave kernels and an ODE oracle.

mod divdiff;
mod oracle;
mod profiles;
mod viscoelastic;

pub use oracle::{ode_oracle, LinearModeOde};
pub use profiles::{j2_zero_limit, profiles_at, ProfileTriple};
pub use viscoelastic::{viscoelastic_kernels, ViscoelasticKernel};

use crate::model::{characteristic_roots, CharacteristicRoots, ModelError, ModelParams};
use num_complex::Complex64;
use thiserror::Error;

type C = Complex64;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PhaseError {
    #[error("time must be nonnegative, got {0}")]
    NegativeTime(f64),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("ODE step size collapsed at r = {r}, t = {t}")]
    OdeStepCollapse { r: f64, t: f64 },
    #[error("time grid must start at 0 and increase strictly")]
    BadTimeGrid,
    #[error("{0} is singular at r = 0; use the zero-frequency limit instead")]
    ZeroFrequency(&'static str),
    #[error("friction coefficient must be positive and finite, got {0}")]
    BadFriction(f64),
    #[error("frequency must be positive and finite, got {0}")]
    BadFrequency(f64),
}

/// How a [`KernelTriple`] was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SourceMethod {
    ClosedForm,
    OdeFallback,
}

/// The fundamental solutions `K̂₀, K̂₁, K̂₂` at one `(r, t)` with two time derivatives.
///
/// `k[j]` solves the mode equation with initial data `e_j`, so
/// `k[j], dk[j], d2k[j]` at `t = 0` form the identity matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelTriple {
    pub r: f64,
    pub t: f64,
    pub k: [C; 3],
    pub dk: [C; 3],
    pub d2k: [C; 3],
    pub source_method: SourceMethod,
}

impl KernelTriple {
    /// Applies the kernels to a data triple, returning `(ψ̂, ψ̂ₜ, ψ̂ₜₜ)`.
    pub fn apply(&self, data: [C; 3]) -> [C; 3] {
        let dot = |v: &[C; 3]| v[0] * data[0] + v[1] * data[1] + v[2] * data[2];
        [dot(&self.k), dot(&self.dk), dot(&self.d2k)]
    }
}

/// Evaluates the kernels from the characteristic roots.
///
/// The kernels are assembled from the divided differences
/// `D_m = (λ^m e^{λt})[λ₁, λ₂, λ₃]`, which stay finite when roots approach
/// each other; near-degenerate root sets still go through the ODE oracle.
pub fn kernels_at(roots: &CharacteristicRoots, t: f64) -> Result<KernelTriple, PhaseError> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(PhaseError::NegativeTime(t));
    }
    let r = roots.r;
    let one = C::new(1.0, 0.0);
    let zero = C::new(0.0, 0.0);
    if r == 0.0 {
        return Ok(KernelTriple {
            r,
            t,
            k: [one, C::new(t, 0.0), C::new(0.5 * t * t, 0.0)],
            dk: [zero, one, C::new(t, 0.0)],
            d2k: [zero, zero, one],
            source_method: SourceMethod::ClosedForm,
        });
    }
    if roots.near_degenerate {
        return oracle_kernels(&roots.params, r, t);
    }
    let (a2, a1, a0) = (roots.cubic.a2, roots.cubic.a1, roots.cubic.a0);
    let [d0, d1, d2] = divdiff::exp_divided_differences(roots.roots, t);
    Ok(KernelTriple {
        r,
        t,
        k: [d2 + d1 * a2 + d0 * a1, d1 + d0 * a2, d0],
        dk: [-(d0 * a0), d2 + d1 * a2, d1],
        d2k: [-(d1 * a0), -(d1 * a1) - d0 * a0, d2],
        source_method: SourceMethod::ClosedForm,
    })
}

fn oracle_kernels(params: &ModelParams, r: f64, t: f64) -> Result<KernelTriple, PhaseError> {
    let mut k = [C::new(0.0, 0.0); 3];
    let mut dk = k;
    let mut d2k = k;
    for j in 0..3 {
        let mut data = [C::new(0.0, 0.0); 3];
        data[j] = C::new(1.0, 0.0);
        let traj = ode_oracle(params, data, None, r, &[0.0, t])?;
        let end = traj[traj.len() - 1];
        k[j] = end[0];
        dk[j] = end[1];
        d2k[j] = end[2];
    }
    Ok(KernelTriple {
        r,
        t,
        k,
        dk,
        d2k,
        source_method: SourceMethod::OdeFallback,
    })
}

/// Solution `(ψ̂, ψ̂ₜ, ψ̂ₜₜ)` of the homogeneous mode equation at `(r, t)`.
pub fn evolve_mode(params: &ModelParams, data_hat: [C; 3], r: f64, t: f64) -> Result<[C; 3], PhaseError> {
    let roots = characteristic_roots(params, r)?;
    Ok(kernels_at(&roots, t)?.apply(data_hat))
}
