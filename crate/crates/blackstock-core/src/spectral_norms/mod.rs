//! Radial L² quadrature of Fourier multipliers, the rate functions of the
//! decay estimates, power-law fitting and the norm studies built on them.

mod data;
mod fit;
mod grid;
mod laws;
mod studies;

pub use data::{GaussTerm, GaussianData, ThirdDatum};
pub use fit::{fit_power_law, loglog_fit, DecayFit};
pub use grid::{sphere_measure, GridConfig, RadialGrid, Zone};
pub use laws::{decay_laws, law_b, law_d, law_d_tilde, law_g1, DecayLaws};
pub use studies::{
    kuznetsov_gap, l1_norm_radial, l2_norm_radial, low_dim_growth, multiplier_norm, optimality_probe,
    profile_error_norm, psi_upper_bound, solution_hat, solution_norms, KuznetsovGap, LowDimGrowth, MultiplierFamily,
    OptimalityLedger, OptimalityRow, ProfileError, SolutionNorms,
};

use crate::model::ModelError;
use crate::phase_solver::PhaseError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormError {
    #[error("dimension {0} is not supported here")]
    Dimension(usize),
    #[error("invalid radial grid configuration")]
    GridConfig,
    #[error("multiplier is not finite at r = {r}")]
    NotFinite { r: f64 },
    #[error("invalid time {0}")]
    BadTime(f64),
    #[error("invalid data: {0}")]
    BadData(String),
    #[error("fit failed: {0}")]
    Fit(String),
    #[error("the moment of the third datum vanishes")]
    ZeroMoment,
    #[error("third datum must be C0*Lap(psi0) + C1*Lap(psi1) with C0*C1 != 0")]
    Coupling,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
}
