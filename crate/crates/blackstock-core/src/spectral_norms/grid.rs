//! Radial quadrature on `(0, R_max]` for rotation-invariant multipliers in ℝⁿ.

use super::NormError;
use crate::quad::GaussLegendre;
use rayon::prelude::*;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

/// Maximum number of uniform panels added by [`RadialGrid::adapted`].
const MAX_UNIFORM_PANELS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub panels: usize,
    pub nodes: usize,
    pub r_max: f64,
    pub eps_zone: f64,
    pub n_zone: f64,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            panels: 64,
            nodes: 16,
            r_max: 1e3,
            eps_zone: 0.1,
            n_zone: 10.0,
        }
    }
}

/// Frequency zone for sharp-cutoff norms.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Zone {
    All,
    /// `r < ε_zone`
    Interior,
    /// `ε_zone ≤ r ≤ N_zone`
    Middle,
    /// `r > N_zone`
    Exterior,
}

/// Composite Gauss–Legendre rule in the radial variable.
///
/// Panels are log-spaced on `[R_max·10⁻⁸, R_max]` with one extra panel from 0,
/// and the zone boundaries are always panel endpoints so sharp cutoffs are
/// integrated exactly.
#[derive(Debug, Clone)]
pub struct RadialGrid {
    pub n: usize,
    pub config: GridConfig,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// Surface measure of the unit sphere in ℝⁿ.
    pub omega: f64,
    breaks: Vec<f64>,
}

/// `|S^{n-1}| = 2π^{n/2}/Γ(n/2)`.
pub fn sphere_measure(n: usize) -> f64 {
    2.0 * PI.powf(0.5 * n as f64) / gamma(0.5 * n as f64)
}

impl RadialGrid {
    pub fn new(n: usize, config: GridConfig) -> Result<Self, NormError> {
        if n == 0 {
            return Err(NormError::Dimension(n));
        }
        let c = config;
        if c.panels == 0
            || c.nodes == 0
            || !(c.r_max > 0.0)
            || !(c.eps_zone > 0.0)
            || !(c.n_zone > c.eps_zone)
            || !c.r_max.is_finite()
        {
            return Err(NormError::GridConfig);
        }
        let lo = c.r_max * 1e-8;
        let ratio = (c.r_max / lo).powf(1.0 / c.panels as f64);
        let mut breaks = vec![0.0];
        let mut b = lo;
        for _ in 0..c.panels {
            breaks.push(b);
            b *= ratio;
        }
        breaks.push(c.r_max);
        for z in [c.eps_zone, c.n_zone] {
            if z < c.r_max {
                breaks.push(z);
            }
        }
        Ok(Self::from_breaks(n, config, breaks))
    }

    pub fn with_defaults(n: usize) -> Result<Self, NormError> {
        Self::new(n, GridConfig::default())
    }

    fn from_breaks(n: usize, config: GridConfig, mut breaks: Vec<f64>) -> Self {
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() <= 1e-14 * a.abs().max(b.abs()));
        let gl = GaussLegendre::cached(config.nodes);
        let mut nodes = Vec::with_capacity(breaks.len() * config.nodes);
        let mut weights = Vec::with_capacity(nodes.capacity());
        for w in breaks.windows(2) {
            let (a, b) = (w[0], w[1]);
            let h = 0.5 * (b - a);
            for (x, wt) in gl.nodes.iter().zip(&gl.weights) {
                nodes.push(a + h * (x + 1.0));
                weights.push(h * wt);
            }
        }
        Self {
            n,
            config,
            nodes,
            weights,
            omega: sphere_measure(n),
            breaks,
        }
    }

    /// Refines the grid for multipliers oscillating like `sin(rt)` under a
    /// Gaussian envelope `e^{-rate·r²t}`: uniform panels of width `π/t` are
    /// added wherever the envelope exceeds `e^{-40}`.
    pub fn adapted(&self, t: f64, rate: f64) -> Self {
        if !(t > 0.0) || !(rate > 0.0) {
            return self.clone();
        }
        let reach = (40.0 / (rate * t)).sqrt().min(self.config.r_max);
        let width = PI / t;
        let count = ((reach / width).ceil() as usize).min(MAX_UNIFORM_PANELS);
        let width = reach / count.max(1) as f64;
        let mut breaks = self.breaks.clone();
        breaks.extend((1..=count).map(|k| k as f64 * width));
        Self::from_breaks(self.n, self.config, breaks)
    }

    pub fn with_dimension(&self, n: usize) -> Self {
        let mut g = self.clone();
        g.n = n;
        g.omega = sphere_measure(n);
        g
    }

    pub fn in_zone(&self, r: f64, zone: Zone) -> bool {
        let (e, big) = (self.config.eps_zone, self.config.n_zone);
        match zone {
            Zone::All => true,
            Zone::Interior => r < e,
            Zone::Middle => r >= e && r <= big,
            Zone::Exterior => r > big,
        }
    }

    /// `ω_n Σ wᵢ rᵢ^{n-1} f(rᵢ)` for each of the `K` components of `f`.
    ///
    /// Nodes are evaluated in parallel but summed in node order, so results do
    /// not depend on the thread count.
    pub fn integrate<const K: usize, F>(&self, zone: Zone, f: F) -> Result<[f64; K], NormError>
    where
        F: Fn(f64) -> [f64; K] + Sync,
    {
        let sums = self.integrate_dyn(zone, K, |r| Ok(f(r).to_vec()))?;
        Ok(std::array::from_fn(|i| sums[i]))
    }

    /// [`integrate`](Self::integrate) for a component count known only at run time.
    pub fn integrate_dyn<F>(&self, zone: Zone, k: usize, f: F) -> Result<Vec<f64>, NormError>
    where
        F: Fn(f64) -> Result<Vec<f64>, NormError> + Sync,
    {
        let n1 = self.n as i32 - 1;
        let terms: Vec<Vec<f64>> = self
            .nodes
            .par_iter()
            .zip(self.weights.par_iter())
            .filter(|(r, _)| self.in_zone(**r, zone))
            .map(|(r, w)| {
                let v = f(*r)?;
                debug_assert_eq!(v.len(), k);
                if v.iter().any(|x| !x.is_finite()) {
                    return Err(NormError::NotFinite { r: *r });
                }
                let scale = w * r.powi(n1);
                Ok(v.into_iter().map(|x| x * scale).collect())
            })
            .collect::<Result<_, _>>()?;
        let mut sums = vec![0.0; k];
        for t in &terms {
            for (o, x) in sums.iter_mut().zip(t) {
                *o += x;
            }
        }
        Ok(sums.into_iter().map(|s| s * self.omega).collect())
    }
}
