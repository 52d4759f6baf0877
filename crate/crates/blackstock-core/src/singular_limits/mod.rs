//! Small-diffusivity and vanishing-viscosity limits of the linear model.

mod certificate;
mod expansion;
mod studies;

pub use certificate::{
    energy_certificate_check, CertificateConstants, CertificateRow, EnergyCertificate, Forcing, MARGIN_TOL,
};
pub use expansion::{
    consistent_third_datum, expansion_terms, first_order_corrector, heat_layer, layer_source, solve_limit_mode,
    ExpansionTerms,
};
pub use studies::{
    check_consistent, default_epsbar_sweep, default_kappa_sweep, default_time_grid, first_order_rate_study,
    limit_envelope_fit, linf_factor, second_order_rate_study, viscous_limit_study, EnvelopeFit, FirstOrderStudy,
    KappaRow, KappaSweep, RateFit, SecondOrderStudy, SupValue, SweepConfig, ViscousLimitStudy, ViscousRow,
    VISCOUS_STUDY_KAPPA,
};

use crate::model::ModelError;
use crate::phase_solver::PhaseError;
use crate::spectral_norms::NormError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LimitError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error(transparent)]
    Norm(#[from] NormError),
    #[error("third datum violates the consistency condition ψ₂ = bνΔψ₁ + Δψ₀")]
    Inconsistent,
    #[error("k₁ must lie in (0, 1), got {0}")]
    BadK1(f64),
    #[error("frequency must be positive and finite, got {0}")]
    BadFrequency(f64),
    #[error("time must be nonnegative and finite, got {0}")]
    BadTime(f64),
    #[error("Duhamel quadrature did not converge at r = {r}, t = {t} (error estimate {estimate})")]
    Quadrature { r: f64, t: f64, estimate: f64 },
    #[error("{0} sweep must be positive and span at least two decades")]
    Sweep(&'static str),
    #[error("dimension {0} is not supported here")]
    Dimension(usize),
    #[error("data vanish identically")]
    ZeroData,
}
