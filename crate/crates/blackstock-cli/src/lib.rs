//! Experiment runner: each subcommand runs one group of studies, writes CSV
//! tables under `<out_dir>/<subcommand>/` and reports pass/fail checks.

pub mod config;
pub mod criteria;
pub mod output;
pub mod summary;

use blackstock_core::model::ModelError;
use blackstock_core::nonlinear_box::NonlinearError;
use blackstock_core::phase_solver::PhaseError;
use blackstock_core::singular_limits::LimitError;
use blackstock_core::spectral_norms::NormError;
pub use config::{ExperimentConfig, Overrides};
pub use criteria::{CriterionOutcome, Ctx, CRITERIA, KNOWN_UNATTAINABLE};
pub use output::Output;
use std::path::Path;
pub use summary::{Check, RunSummary};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("{study} failed: {message}")]
    Study { study: &'static str, message: String },
}

impl CliError {
    /// 2 for usage, configuration and file errors; 1 when a study itself fails.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) | Self::Io(_) => 2,
            Self::Study { .. } => 1,
        }
    }

    fn study(study: &'static str, e: impl std::fmt::Display) -> Self {
        Self::Study {
            study,
            message: e.to_string(),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::OutOfRange { .. } => Self::Config(e.to_string()),
            _ => Self::study("model", e),
        }
    }
}

impl From<PhaseError> for CliError {
    fn from(e: PhaseError) -> Self {
        Self::study("phase solver", e)
    }
}

impl From<NormError> for CliError {
    fn from(e: NormError) -> Self {
        match e {
            NormError::Dimension(_) | NormError::GridConfig | NormError::BadData(_) | NormError::Coupling => {
                Self::Config(e.to_string())
            }
            NormError::Model(m) => m.into(),
            _ => Self::study("radial norms", e),
        }
    }
}

impl From<LimitError> for CliError {
    fn from(e: LimitError) -> Self {
        match e {
            LimitError::Inconsistent
            | LimitError::Dimension(_)
            | LimitError::Sweep(_)
            | LimitError::BadK1(_)
            | LimitError::ZeroData => Self::Config(e.to_string()),
            LimitError::Norm(n) => n.into(),
            LimitError::Model(m) => m.into(),
            _ => Self::study("singular limits", e),
        }
    }
}

impl From<NonlinearError> for CliError {
    fn from(e: NonlinearError) -> Self {
        match e {
            NonlinearError::Config(msg) => Self::Config(msg),
            _ => Self::study("nonlinear box", e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Roots,
    Kernels,
    Decay,
    Profiles,
    Optimality,
    KuznetsovGap,
    SingularLimit,
    SecondOrder,
    EnergyCert,
    ViscousLimit,
    Nonlinear,
    All,
}

impl Subcommand {
    pub const ALL: [Subcommand; 12] = [
        Self::Roots,
        Self::Kernels,
        Self::Decay,
        Self::Profiles,
        Self::Optimality,
        Self::KuznetsovGap,
        Self::SingularLimit,
        Self::SecondOrder,
        Self::EnergyCert,
        Self::ViscousLimit,
        Self::Nonlinear,
        Self::All,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Roots => "roots",
            Self::Kernels => "kernels",
            Self::Decay => "decay",
            Self::Profiles => "profiles",
            Self::Optimality => "optimality",
            Self::KuznetsovGap => "kuznetsov-gap",
            Self::SingularLimit => "singular-limit",
            Self::SecondOrder => "second-order",
            Self::EnergyCert => "energy-cert",
            Self::ViscousLimit => "viscous-limit",
            Self::Nonlinear => "nonlinear",
            Self::All => "all",
        }
    }

    /// Acceptance criteria evaluated by this subcommand.
    pub fn criteria(&self) -> Vec<u8> {
        match self {
            Self::Roots => vec![1],
            Self::Kernels => vec![2, 10],
            Self::Decay => vec![3, 4],
            Self::Profiles => vec![5],
            Self::Optimality => vec![],
            Self::KuznetsovGap => vec![6],
            Self::SingularLimit => vec![7],
            Self::SecondOrder => vec![8],
            Self::EnergyCert => vec![9],
            Self::ViscousLimit => vec![12],
            Self::Nonlinear => vec![11],
            Self::All => (1..=12).collect(),
        }
    }
}

/// Result of one invocation.
#[derive(Debug, Clone)]
pub struct Run {
    pub summary: RunSummary,
    pub outcomes: Vec<CriterionOutcome>,
}

/// Runs `sub` with a validated configuration, writing into `<out_dir>/<sub>/`
/// unless `out` is given.
pub fn run(sub: Subcommand, cfg: &ExperimentConfig, out: Option<Output>, gnuplot: bool) -> Result<Run, CliError> {
    let out = match out {
        Some(o) => o,
        None => Output::to_dir(&Path::new(&cfg.out_dir).join(sub.name()), gnuplot)?,
    };
    let ctx = Ctx::new(cfg, &out)?;
    let mut summary = RunSummary::new(sub.name());
    let mut outcomes = Vec::new();
    for id in sub.criteria() {
        let o = criteria::evaluate(id, &ctx)?;
        summary.extend(o.checks.iter().cloned());
        outcomes.push(o);
    }
    if matches!(sub, Subcommand::Optimality | Subcommand::All) {
        summary.extend(criteria::optimality(&ctx)?);
    }
    if let Some(dir) = out.dir() {
        let path = dir.join("summary.csv");
        summary
            .write_csv(&path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    // Runtimes vary between runs, so they are kept out of summary.csv.
    summary.extend(outcomes.iter().map(|o| o.runtime_check()));
    Ok(Run { summary, outcomes })
}
