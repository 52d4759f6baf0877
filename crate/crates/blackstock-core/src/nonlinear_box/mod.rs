//! Small-data nonlinear model on a periodic box: nonlinearity, exact-linear
//! exponential integrator, Picard iteration and quadratic-scaling checks.

mod convolution;
mod picard;
mod stepper;
mod torus;

pub use convolution::{convolution_check, weighted_convolution, ConvolutionCheck};
pub use picard::{
    contraction_scan, gap_richardson, picard_iterate, small_data_run, xs_norm, GapRichardson, LedgerRow,
    NonlinearConfig, PicardRun, SmallDataRun, TorusData, BLOW_UP_FACTOR,
};
pub use stepper::{duhamel_step, linear_step, nonlinearity_f, NonlinearState, Source, Stepper};
pub use torus::{default_points, TorusGrid};

use crate::phase_solver::PhaseError;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NonlinearError {
    #[error("invalid nonlinear configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Phase(#[from] PhaseError),
    #[error("kernel quadrature did not converge at |k| = {r} (error estimate {estimate})")]
    Quadrature { r: f64, estimate: f64 },
    #[error("non-finite state at t = {t}")]
    NotFinite { t: f64 },
    #[error("blow-up detected at t = {t}")]
    BlowUp { t: f64 },
}
