//! Experiment configuration: a TOML file with one table per block.
//!
//! Unknown keys are rejected. Optional keys left out fall back to the preset of
//! the study being run, so one file can drive every subcommand.

use crate::CliError;
use blackstock_core::model::{derive_params, ModelParams};
use blackstock_core::nonlinear_box::NonlinearConfig;
use blackstock_core::singular_limits::{default_epsbar_sweep, default_kappa_sweep, VISCOUS_STUDY_KAPPA};
use blackstock_core::spectral_norms::GridConfig;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// Spatial dimension; each study has its own default when absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    pub out_dir: String,
    pub model: ModelBlock,
    /// Replaces the per-study data presets when present.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<DataBlock>,
    pub grid: GridBlock,
    pub sweep: SweepBlock,
    pub nonlinear: NonlinearBlock,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            n: None,
            out_dir: "blackstock-out".into(),
            model: ModelBlock::default(),
            data: None,
            grid: GridBlock::default(),
            sweep: SweepBlock::default(),
            nonlinear: NonlinearBlock::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelBlock {
    pub kappa: f64,
    pub b: f64,
    pub nu: f64,
    pub gamma: f64,
    pub c0: f64,
    pub inviscid: bool,
}

impl Default for ModelBlock {
    fn default() -> Self {
        let p = ModelParams::default();
        Self {
            kappa: p.kappa(),
            b: p.b(),
            nu: p.nu(),
            gamma: p.gamma(),
            c0: p.c0(),
            inviscid: p.is_inviscid(),
        }
    }
}

/// Radial Gaussian data `a·e^{-|x|²/(2σ²)}`, one `[a, σ]` pair per datum.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataBlock {
    pub psi0: [f64; 2],
    pub psi1: [f64; 2],
    pub psi2: [f64; 2],
    /// Singular-limit studies replace `psi2` by the consistent third datum.
    pub consistent: bool,
    /// Coupling of the Kuznetsov comparison, `ψ₂ = C0·Δψ₀ + C1·Δψ₁`.
    pub kuznetsov_c0: f64,
    pub kuznetsov_c1: f64,
}

impl Default for DataBlock {
    fn default() -> Self {
        Self {
            psi0: [1.0, 1.0],
            psi1: [0.5, 1.0],
            psi2: [1.0, 1.0],
            consistent: true,
            kuznetsov_c0: 1.0,
            kuznetsov_c1: 1.0,
        }
    }
}

impl DataBlock {
    pub fn terms(&self) -> [(f64, f64); 3] {
        [
            (self.psi0[0], self.psi0[1]),
            (self.psi1[0], self.psi1[1]),
            (self.psi2[0], self.psi2[1]),
        ]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridBlock {
    pub panels: usize,
    pub nodes: usize,
    pub r_max: f64,
    pub eps_zone: f64,
    pub n_zone: f64,
}

impl Default for GridBlock {
    fn default() -> Self {
        let g = GridConfig::default();
        Self {
            panels: g.panels,
            nodes: g.nodes,
            r_max: g.r_max,
            eps_zone: g.eps_zone,
            n_zone: g.n_zone,
        }
    }
}

impl From<GridBlock> for GridConfig {
    fn from(g: GridBlock) -> Self {
        GridConfig {
            panels: g.panels,
            nodes: g.nodes,
            r_max: g.r_max,
            eps_zone: g.eps_zone,
            n_zone: g.n_zone,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepBlock {
    /// Time window `[t_min, t_max]` with `t_points` log-spaced samples; each
    /// study has its own window when these are absent.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_points: Option<usize>,
    pub kappa_list: Vec<f64>,
    pub epsbar_list: Vec<f64>,
    pub viscous_kappa: f64,
    /// Seed of the random parameter sets in the root check.
    pub seed: u64,
    pub random_sets: usize,
}

impl Default for SweepBlock {
    fn default() -> Self {
        Self {
            t_min: None,
            t_max: None,
            t_points: None,
            kappa_list: default_kappa_sweep(),
            epsbar_list: default_epsbar_sweep(),
            viscous_kappa: VISCOUS_STUDY_KAPPA,
            seed: 20_240_917,
            random_sets: 20,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NonlinearBlock {
    pub d: usize,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "L")]
    pub length: f64,
    pub epsilon: f64,
    pub dt: f64,
    #[serde(rename = "T")]
    pub t_end: f64,
    pub s: f64,
    pub picard_iterations: usize,
    /// Horizon of the boundedness ledger and the gap Richardson pair.
    #[serde(rename = "T_ledger")]
    pub t_ledger: f64,
    pub sample_every: usize,
}

impl Default for NonlinearBlock {
    fn default() -> Self {
        let c = NonlinearConfig::default();
        Self {
            d: c.d,
            m: c.m,
            length: c.length,
            epsilon: c.epsilon,
            dt: c.dt,
            t_end: c.t_end,
            s: c.s,
            picard_iterations: 4,
            t_ledger: 10.0,
            sample_every: 100,
        }
    }
}

impl NonlinearBlock {
    pub fn core(&self) -> NonlinearConfig {
        NonlinearConfig {
            d: self.d,
            m: self.m,
            length: self.length,
            epsilon: self.epsilon,
            dt: self.dt,
            t_end: self.t_end,
            s: self.s,
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub kappa: Option<f64>,
    pub n: Option<usize>,
    pub t_max: Option<f64>,
    pub seed: Option<u64>,
    pub out_dir: Option<String>,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(msg) => CliError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn emit(&self) -> String {
        toml::to_string(self).expect("configuration is always representable")
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(k) = o.kappa {
            self.model.kappa = k;
        }
        if let Some(n) = o.n {
            self.n = Some(n);
        }
        if let Some(t) = o.t_max {
            self.sweep.t_max = Some(t);
        }
        if let Some(s) = o.seed {
            self.sweep.seed = s;
        }
        if let Some(d) = &o.out_dir {
            self.out_dir = d.clone();
        }
    }

    pub fn params(&self) -> Result<ModelParams, CliError> {
        let m = &self.model;
        derive_params(m.kappa, m.b, m.nu, m.gamma, m.c0, m.inviscid).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Log-spaced window with the given study defaults, after applying `[sweep]`.
    pub fn window(&self, t_min: f64, t_max: f64, points: usize) -> Result<Vec<f64>, CliError> {
        let lo = self.sweep.t_min.unwrap_or(t_min);
        let hi = self.sweep.t_max.unwrap_or(t_max);
        let k = self.sweep.t_points.unwrap_or(points);
        if !(lo > 0.0 && hi > lo && hi.is_finite()) || k < 2 {
            return Err(CliError::Config(format!(
                "time window needs 0 < t_min < t_max and t_points ≥ 2, got [{lo}, {hi}] with {k} points"
            )));
        }
        Ok(blackstock_core::model::logspace(lo, hi, k))
    }
}

const DOCS: &[(&str, &str, &str)] = &[
    (
        "",
        "n",
        "Spatial dimension. Absent: each study uses its own (see README).",
    ),
    (
        "",
        "out_dir",
        "Root of the output tree; every run writes to <out_dir>/<subcommand>/.",
    ),
    ("model", "", "Physical constants. delta and gamma_tilde are derived."),
    (
        "model",
        "kappa",
        "Modified thermal diffusivity, > 0 (warning above 0.1).",
    ),
    ("model", "b", "Viscosity number, > 0."),
    ("model", "nu", "Modified kinematic viscosity, > 0."),
    ("model", "gamma", "Ratio of specific heats, in (1, 5/3]."),
    ("model", "c0", "Speed of sound, > 0."),
    ("model", "inviscid", "Drop the viscous term (b*nu treated as 0)."),
    (
        "data",
        "",
        "Optional. Radial Gaussians a*exp(-|x|^2/(2 sigma^2)) given as [a, sigma].",
    ),
    ("data", "psi0", "Initial value."),
    ("data", "psi1", "Initial velocity."),
    ("data", "psi2", "Initial acceleration."),
    (
        "data",
        "consistent",
        "Singular-limit studies replace psi2 by the consistent datum.",
    ),
    (
        "data",
        "kuznetsov_c0",
        "Kuznetsov comparison uses psi2 = C0*Lap(psi0) + C1*Lap(psi1).",
    ),
    ("data", "kuznetsov_c1", "See kuznetsov_c0."),
    ("grid", "", "Composite Gauss-Legendre radial quadrature."),
    ("grid", "panels", "Log-spaced panels on [1e-8*r_max, r_max]."),
    ("grid", "nodes", "Gauss-Legendre nodes per panel."),
    ("grid", "r_max", "Frequency cutoff."),
    ("grid", "eps_zone", "Upper edge of the low-frequency zone."),
    ("grid", "n_zone", "Lower edge of the high-frequency zone."),
    ("sweep", "", "Time windows and parameter sweeps."),
    ("sweep", "t_min", "Optional. Start of the log-spaced time window."),
    ("sweep", "t_max", "Optional. End of the time window (also --t-max)."),
    ("sweep", "t_points", "Optional. Samples in the time window."),
    ("sweep", "kappa_list", "Diffusivities of the singular-limit sweeps."),
    ("sweep", "epsbar_list", "Viscosities b*nu of the viscous-limit sweep."),
    ("sweep", "viscous_kappa", "Diffusivity used by the viscous-limit sweep."),
    (
        "sweep",
        "seed",
        "Seed of the random parameter sets in the root check (also --seed).",
    ),
    (
        "sweep",
        "random_sets",
        "Number of random parameter sets in the root check.",
    ),
    ("nonlinear", "", "Periodic box [0, L)^d with M points per axis."),
    ("nonlinear", "d", "Box dimension, 1 to 3."),
    ("nonlinear", "M", "Points per axis, a power of two."),
    ("nonlinear", "L", "Box length."),
    ("nonlinear", "epsilon", "Amplitude of the reference data."),
    ("nonlinear", "dt", "Time step; T and T_ledger must be multiples of it."),
    ("nonlinear", "T", "Horizon of the Picard iteration."),
    ("nonlinear", "s", "Regularity index of the evolution-space norm."),
    ("nonlinear", "picard_iterations", "Picard iterations per amplitude."),
    (
        "nonlinear",
        "T_ledger",
        "Horizon of the boundedness ledger and gap Richardson pair.",
    ),
    ("nonlinear", "sample_every", "Ledger sampling interval in steps."),
];

fn doc(section: &str, key: &str) -> Option<&'static str> {
    DOCS.iter().find(|(s, k, _)| *s == section && *k == key).map(|d| d.2)
}

/// The default configuration with every key documented; optional keys are
/// shown commented out.
pub fn reference_toml() -> String {
    let mut defaults = ExperimentConfig::default();
    let data = DataBlock::default();
    defaults.data = Some(data);
    let body = defaults.emit();
    let mut out = String::from("# blackstock reference configuration (generated by `blackstock config`).\n");
    out.push_str("# Every key is optional; the values shown are the defaults.\n\n");
    let mut section = String::new();
    let optional_top = "# n = 3\n";
    out.push_str(&format!("# {}\n{optional_top}", doc("", "n").unwrap_or_default()));
    for line in body.lines() {
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.to_string();
            out.push('\n');
            if let Some(d) = doc(&section, "") {
                out.push_str(&format!("# {d}\n"));
            }
            out.push_str(if section == "data" { "# [data]\n" } else { line });
            if section != "data" {
                out.push('\n');
            }
            if section == "sweep" {
                for (key, example) in [("t_min", "100.0"), ("t_max", "100000.0"), ("t_points", "10")] {
                    out.push_str(&format!(
                        "# {}\n# {key} = {example}\n",
                        doc("sweep", key).unwrap_or_default()
                    ));
                }
            }
            continue;
        }
        if line.trim().is_empty() {
            continue;
        }
        let key = line.split('=').next().unwrap_or("").trim();
        if let Some(d) = doc(&section, key) {
            out.push_str(&format!("# {d}\n"));
        }
        if section == "data" {
            out.push_str("# ");
        }
        out.push_str(line);
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_emitted_key_is_documented() {
        let mut c = ExperimentConfig {
            n: Some(3),
            data: Some(DataBlock::default()),
            ..Default::default()
        };
        c.sweep.t_min = Some(1.0);
        c.sweep.t_max = Some(2.0);
        c.sweep.t_points = Some(3);
        let mut section = String::new();
        for line in c.emit().lines() {
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = name.to_string();
                assert!(doc(&section, "").is_some(), "[{section}]");
            } else if let Some((key, _)) = line.split_once('=') {
                assert!(doc(&section, key.trim()).is_some(), "{section}.{}", key.trim());
            }
        }
    }

    #[test]
    fn reference_parses_to_defaults() {
        assert_eq!(
            ExperimentConfig::parse(&reference_toml()).unwrap(),
            ExperimentConfig::default()
        );
    }

    #[test]
    fn overrides_take_precedence() {
        let mut c = ExperimentConfig::default();
        c.apply(&Overrides {
            kappa: Some(0.05),
            n: Some(5),
            t_max: Some(1e3),
            seed: Some(7),
            out_dir: Some("x".into()),
        });
        assert_eq!(
            (c.model.kappa, c.n, c.sweep.t_max, c.sweep.seed),
            (0.05, Some(5), Some(1e3), 7)
        );
        assert_eq!(c.out_dir, "x");
    }

    #[test]
    fn bad_window_is_a_config_error() {
        let mut c = ExperimentConfig::default();
        c.sweep.t_max = Some(1.0);
        assert!(matches!(c.window(10.0, 100.0, 5), Err(CliError::Config(_))));
    }
}
