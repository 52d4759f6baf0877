//! Picard iteration of the Duhamel operator and small-data runs on the torus.

use super::stepper::{nonlinearity_f, NonlinearState, Source, Stepper};
use super::torus::TorusGrid;
use super::NonlinearError;
use crate::model::ModelParams;
use num_complex::Complex64;

type C = Complex64;

/// Blow-up threshold relative to the initial norms.
pub const BLOW_UP_FACTOR: f64 = 1e6;

/// Run settings for the nonlinear box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonlinearConfig {
    pub d: usize,
    pub m: usize,
    pub length: f64,
    pub epsilon: f64,
    pub dt: f64,
    pub t_end: f64,
    /// Regularity index of the evolution-space norm.
    pub s: f64,
}

impl Default for NonlinearConfig {
    fn default() -> Self {
        Self {
            d: 1,
            m: 256,
            length: 2.0 * std::f64::consts::PI,
            epsilon: 1e-3,
            dt: 1e-3,
            t_end: 1.0,
            s: 2.0,
        }
    }
}

impl NonlinearConfig {
    pub fn grid(&self) -> Result<TorusGrid, NonlinearError> {
        TorusGrid::new(self.d, self.m, self.length)
    }

    pub fn steps(&self) -> Result<usize, NonlinearError> {
        if !(self.t_end > 0.0) || !(self.dt > 0.0) || !self.t_end.is_finite() {
            return Err(NonlinearError::Config(format!(
                "need positive horizon and step, got T = {}, dt = {}",
                self.t_end, self.dt
            )));
        }
        let n = (self.t_end / self.dt).round();
        if (n * self.dt - self.t_end).abs() > 1e-9 * self.t_end {
            return Err(NonlinearError::Config(format!(
                "T = {} is not a multiple of dt = {}",
                self.t_end, self.dt
            )));
        }
        Ok(n as usize)
    }
}

/// Initial data `(ψ₀, ψ₁, ψ₂)` on the torus, as spectral coefficients.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusData {
    pub fields: [Vec<C>; 3],
}

impl TorusData {
    pub fn from_fn<F0, F1, F2>(grid: &TorusGrid, f0: F0, f1: F1, f2: F2) -> Self
    where
        F0: Fn(&[f64; 3]) -> f64,
        F1: Fn(&[f64; 3]) -> f64,
        F2: Fn(&[f64; 3]) -> f64,
    {
        Self {
            fields: [grid.sample(f0), grid.sample(f1), grid.sample(f2)],
        }
    }

    /// Zero-mean trigonometric data of unit size, one term per axis.
    pub fn reference(grid: &TorusGrid) -> Self {
        let d = grid.d;
        Self::from_fn(
            grid,
            move |x| (0..d).map(|a| x[a].cos() + 0.5 * (2.0 * x[a]).sin()).sum(),
            move |x| (0..d).map(|a| 0.3 * x[a].cos()).sum(),
            move |x| (0..d).map(|a| -0.2 * (3.0 * x[a]).cos()).sum(),
        )
    }

    pub fn scaled(&self, eps: f64) -> Self {
        Self {
            fields: self.fields.clone().map(|f| f.into_iter().map(|c| c * eps).collect()),
        }
    }

    pub fn state(&self) -> NonlinearState {
        NonlinearState {
            t: 0.0,
            fields: self.fields.clone(),
        }
    }
}

/// Precomputed `|k|^{2p}` weights of the evolution-space norm.
struct XsWeights {
    d: usize,
    s: f64,
    /// `[|D|^{s+4}, |D|^{s+2}, |D|^s]` squared, per mode
    hom: [Vec<f64>; 3],
    volume: f64,
}

impl XsWeights {
    fn new(grid: &TorusGrid, s: f64) -> Self {
        let w = |p: f64| -> Vec<f64> {
            grid.wavevectors
                .iter()
                .map(|k| {
                    let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                    if k2 == 0.0 {
                        0.0
                    } else {
                        k2.powf(p)
                    }
                })
                .collect()
        };
        Self {
            d: grid.d,
            s,
            hom: [w(s + 4.0), w(s + 2.0), w(s)],
            volume: grid.length.powi(grid.d as i32),
        }
    }

    /// Bracket of the evolution-space norm at one time.
    fn at(&self, state: &NonlinearState) -> f64 {
        let n4 = 0.25 * self.d as f64;
        let t1 = 1.0 + state.t;
        (0..3)
            .map(|l| {
                let f = &state.fields[l];
                let plain: f64 = f.iter().map(|c| c.norm_sqr()).sum::<f64>();
                let hom: f64 = f.iter().zip(&self.hom[l]).map(|(c, w)| w * c.norm_sqr()).sum();
                let lf = l as f64;
                t1.powf(-(2.0 - lf) / 2.0 + n4) * (self.volume * plain).sqrt()
                    + t1.powf((self.s + 2.0 - lf) / 2.0 + n4) * (self.volume * hom).sqrt()
            })
            .sum()
    }

    fn sup(&self, traj: &[NonlinearState]) -> f64 {
        traj.iter().map(|s| self.at(s)).fold(0.0, f64::max)
    }

    fn sup_diff(&self, a: &[NonlinearState], b: &[NonlinearState]) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| {
                let diff = NonlinearState {
                    t: x.t,
                    fields: std::array::from_fn(|l| x.fields[l].iter().zip(&y.fields[l]).map(|(p, q)| p - q).collect()),
                };
                self.at(&diff)
            })
            .fold(0.0, f64::max)
    }
}

/// Discrete evolution-space norm, supremum over the stored states.
pub fn xs_norm(grid: &TorusGrid, traj: &[NonlinearState], s: f64) -> f64 {
    XsWeights::new(grid, s).sup(traj)
}

fn linear_trajectory(stepper: &Stepper, data: &TorusData, steps: usize) -> Vec<NonlinearState> {
    let mut traj = Vec::with_capacity(steps + 1);
    traj.push(data.state());
    for n in 0..steps {
        let next = stepper.linear_step(&traj[n]);
        traj.push(next);
    }
    traj
}

#[derive(Debug, Clone, PartialEq)]
pub struct PicardRun {
    pub epsilon: f64,
    /// `‖ψ^{(k)}‖_{X_s(T)}` for `k = 0, 1, …`
    pub norms: Vec<f64>,
    /// `‖ψ^{(k+1)} - ψ^{(k)}‖_{X_s(T)}`
    pub differences: Vec<f64>,
    /// Set when the differences grew three times in a row; iteration stops there.
    pub non_contraction: bool,
}

impl PicardRun {
    /// Successive ratios of the differences.
    pub fn ratios(&self) -> Vec<f64> {
        self.differences
            .windows(2)
            .filter(|w| w[0] > 0.0)
            .map(|w| w[1] / w[0])
            .collect()
    }

    pub fn worst_ratio(&self) -> f64 {
        self.ratios().into_iter().fold(0.0, f64::max)
    }
}

/// `ψ^{(0)} = ψ^{lin}`, `ψ^{(k+1)} = ψ^{lin} + ∫₀ᵗ K₂(t-σ) ∗ F(ψ^{(k)}(σ)) dσ`.
///
/// The Duhamel integral uses the exact kernel weights with `F(ψ^{(k)})` interpolated
/// linearly between time steps.
pub fn picard_iterate(
    data: &TorusData,
    params: &ModelParams,
    config: &NonlinearConfig,
    iterations: usize,
) -> Result<PicardRun, NonlinearError> {
    let grid = config.grid()?;
    let steps = config.steps()?;
    let stepper = Stepper::new(&grid, params, config.dt)?;
    let weights = XsWeights::new(&grid, config.s);
    let mut current = linear_trajectory(&stepper, data, steps);
    let mut norms = vec![weights.sup(&current)];
    let mut differences = Vec::new();
    let mut growth = 0;
    let mut non_contraction = false;
    for _ in 0..iterations {
        let forcing: Vec<Vec<C>> = current
            .iter()
            .map(|s| nonlinearity_f(&grid, s.psi(), s.psi_t(), params))
            .collect();
        let mut next = Vec::with_capacity(steps + 1);
        next.push(data.state());
        for n in 0..steps {
            let s = stepper.forced_step(&next[n], &forcing[n], &forcing[n + 1]);
            if s.fields.iter().flatten().any(|c| !c.re.is_finite()) {
                return Err(NonlinearError::NotFinite { t: s.t });
            }
            next.push(s);
        }
        let diff = weights.sup_diff(&next, &current);
        if differences.last().is_some_and(|prev| diff > *prev) {
            growth += 1;
        } else {
            growth = 0;
        }
        differences.push(diff);
        norms.push(weights.sup(&next));
        current = next;
        if growth >= 3 {
            non_contraction = true;
            break;
        }
        // converged to round-off; further ratios would be noise
        if diff <= 1e-13 * norms.last().copied().unwrap_or(0.0) {
            break;
        }
    }
    Ok(PicardRun {
        epsilon: f64::NAN,
        norms,
        differences,
        non_contraction,
    })
}

/// Picard runs for each amplitude of `reference` data.
pub fn contraction_scan(
    reference: &TorusData,
    params: &ModelParams,
    config: &NonlinearConfig,
    amplitudes: &[f64],
    iterations: usize,
) -> Result<Vec<PicardRun>, NonlinearError> {
    amplitudes
        .iter()
        .map(|eps| {
            let mut run = picard_iterate(&reference.scaled(*eps), params, config, iterations)?;
            run.epsilon = *eps;
            Ok(run)
        })
        .collect()
}

/// One sampled row of a small-data run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LedgerRow {
    pub t: f64,
    /// `‖∂ₜ^ℓψ‖_{L²}`, `ℓ = 0, 1, 2`
    pub l2: [f64; 3],
    /// `‖ψ‖_{H^{s+4}}`
    pub sobolev: f64,
    /// `‖ψ - ψ^{lin}‖_{L²}`
    pub gap: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmallDataRun {
    pub rows: Vec<LedgerRow>,
    /// Largest `sup_t N(ψ) / sup_t N(ψ^{lin})` over the tracked norms.
    pub envelope_ratio: f64,
    pub sup_gap: f64,
}

impl SmallDataRun {
    /// All tracked norms within twice the linear envelope.
    pub fn bounded(&self) -> bool {
        self.envelope_ratio <= 2.0
    }
}

/// Runs the nonlinear model next to its linearization, sampling every `sample_every` steps.
pub fn small_data_run(
    data: &TorusData,
    params: &ModelParams,
    config: &NonlinearConfig,
    sample_every: usize,
) -> Result<SmallDataRun, NonlinearError> {
    let grid = config.grid()?;
    let steps = config.steps()?;
    let stepper = Stepper::new(&grid, params, config.dt)?;
    let every = sample_every.max(1);
    let p = config.s + 4.0;
    let norms = |s: &NonlinearState| -> [f64; 4] {
        [
            grid.l2_norm(s.psi()),
            grid.l2_norm(s.psi_t()),
            grid.l2_norm(s.psi_tt()),
            grid.sobolev_norm(s.psi(), p),
        ]
    };
    let mut state = data.state();
    let mut lin = data.state();
    let initial = norms(&state);
    let scale = initial.iter().copied().fold(0.0, f64::max);
    let mut sup = [0.0f64; 4];
    let mut sup_lin = [0.0f64; 4];
    let mut rows = Vec::new();
    let mut sup_gap = 0.0f64;
    for n in 0..=steps {
        let now = norms(&state);
        let now_lin = norms(&lin);
        for j in 0..4 {
            sup[j] = sup[j].max(now[j]);
            sup_lin[j] = sup_lin[j].max(now_lin[j]);
        }
        let gap_c: Vec<C> = state.psi().iter().zip(lin.psi()).map(|(a, b)| a - b).collect();
        let gap = grid.l2_norm(&gap_c);
        sup_gap = sup_gap.max(gap);
        if now
            .iter()
            .any(|v| !v.is_finite() || *v > BLOW_UP_FACTOR * scale.max(f64::MIN_POSITIVE))
        {
            return Err(NonlinearError::BlowUp { t: state.t });
        }
        if n % every == 0 || n == steps {
            rows.push(LedgerRow {
                t: state.t,
                l2: [now[0], now[1], now[2]],
                sobolev: now[3],
                gap,
            });
        }
        if n < steps {
            state = stepper.duhamel_step(&state, &Source::Nonlinear)?;
            lin = stepper.linear_step(&lin);
        }
    }
    let envelope_ratio = (0..4)
        .filter(|j| sup_lin[*j] > 0.0)
        .map(|j| sup[j] / sup_lin[j])
        .fold(0.0, f64::max);
    Ok(SmallDataRun {
        rows,
        envelope_ratio,
        sup_gap,
    })
}

/// `sup_t‖ψ - ψ^{lin}‖/ε²` at `ε` and `ε/2` for `reference` data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GapRichardson {
    pub epsilon: f64,
    pub scaled_gap: f64,
    pub scaled_gap_half: f64,
}

impl GapRichardson {
    pub fn relative_change(&self) -> f64 {
        (self.scaled_gap - self.scaled_gap_half).abs() / self.scaled_gap_half
    }
}

pub fn gap_richardson(
    reference: &TorusData,
    params: &ModelParams,
    config: &NonlinearConfig,
) -> Result<GapRichardson, NonlinearError> {
    let eps = config.epsilon;
    let sample = (config.steps()? / 100).max(1);
    let (a, b) = rayon::join(
        || small_data_run(&reference.scaled(eps), params, config, sample),
        || small_data_run(&reference.scaled(0.5 * eps), params, config, sample),
    );
    Ok(GapRichardson {
        epsilon: eps,
        scaled_gap: a?.sup_gap / (eps * eps),
        scaled_gap_half: b?.sup_gap / (0.25 * eps * eps),
    })
}
