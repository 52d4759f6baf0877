//! Linear and nonlinear analysis of the general Blackstock model: characteristic
//! roots, exact Fourier multipliers, radial norm studies, singular-limit rate
//! studies and a periodic-box nonlinear solver.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod model;
pub mod nonlinear_box;
pub mod phase_solver;
pub mod presets;
pub mod quad;
pub mod singular_limits;
pub mod spectral_norms;

pub use num_complex::Complex64;
