//! Exact linear propagation per lattice shell and the exponential Runge–Kutta step.

use super::torus::TorusGrid;
use super::NonlinearError;
use crate::model::{characteristic_roots, ModelParams};
use crate::phase_solver::{kernels_at, KernelTriple};
use crate::quad::adaptive_gk_real;
use num_complex::Complex64;
use std::collections::HashMap;

type C = Complex64;

/// Spectral coefficients of `(ψ, ψₜ, ψₜₜ)` at time `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct NonlinearState {
    pub t: f64,
    pub fields: [Vec<C>; 3],
}

impl NonlinearState {
    pub fn zero(grid: &TorusGrid) -> Self {
        let z = vec![C::new(0.0, 0.0); grid.len()];
        Self {
            t: 0.0,
            fields: [z.clone(), z.clone(), z],
        }
    }

    pub fn psi(&self) -> &[C] {
        &self.fields[0]
    }

    pub fn psi_t(&self) -> &[C] {
        &self.fields[1]
    }

    pub fn psi_tt(&self) -> &[C] {
        &self.fields[2]
    }

    /// `ψ(t, x)` on the grid.
    pub fn real_field(&self, grid: &TorusGrid, level: usize) -> Vec<f64> {
        grid.inverse(&self.fields[level])
    }

    fn is_finite(&self) -> bool {
        self.fields
            .iter()
            .flatten()
            .all(|c| c.re.is_finite() && c.im.is_finite())
    }
}

/// `F(ψ) = c₀⁻²(2|∇ψₜ|² + 2∇ψ·∇Δψ + (γ-1)(Δψ)² + (γ-1)ψₜΔψₜ)`, dealiased.
pub fn nonlinearity_f(grid: &TorusGrid, psi: &[C], psi_t: &[C], params: &ModelParams) -> Vec<C> {
    let g1 = params.gamma() - 1.0;
    let c0 = params.c0();
    let lap = grid.laplacian(psi);
    let lap_t = grid.laplacian(psi_t);
    let mut acc: Vec<f64> = {
        let a = grid.inverse(&lap);
        let b = grid.inverse(psi_t);
        let c = grid.inverse(&lap_t);
        a.iter()
            .zip(&b)
            .zip(&c)
            .map(|((a, b), c)| g1 * a * a + g1 * b * c)
            .collect()
    };
    for axis in 0..grid.d {
        let gt = grid.inverse(&grid.partial(psi_t, axis));
        let gp = grid.inverse(&grid.partial(psi, axis));
        let gl = grid.inverse(&grid.partial(&lap, axis));
        for (i, a) in acc.iter_mut().enumerate() {
            *a += 2.0 * gt[i] * gt[i] + 2.0 * gp[i] * gl[i];
        }
    }
    let scale = 1.0 / (c0 * c0);
    acc.iter_mut().for_each(|a| *a *= scale);
    let mut out = grid.forward(&acc);
    grid.dealias(&mut out);
    out
}

/// Per-shell propagator over one step `h`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct ShellStep {
    /// `phi[i][j] = ∂ₜⁱK̂ⱼ(h)`
    phi: [[f64; 3]; 3],
    /// `∫₀ʰ ∂ₜⁱK̂₂(τ) dτ`
    w0: [f64; 3],
    /// `∫₀ʰ ∂ₜⁱK̂₂(τ)(h-τ)/h dτ`
    w1: [f64; 3],
}

fn real_rows(k: &KernelTriple) -> [[f64; 3]; 3] {
    [k.k.map(|z| z.re), k.dk.map(|z| z.re), k.d2k.map(|z| z.re)]
}

impl ShellStep {
    fn new(params: &ModelParams, r: f64, h: f64) -> Result<Self, NonlinearError> {
        let roots = characteristic_roots(params, r).map_err(crate::phase_solver::PhaseError::from)?;
        let phi = real_rows(&kernels_at(&roots, h)?);
        let mut w0 = [0.0; 3];
        let mut w1 = [0.0; 3];
        for i in 0..3 {
            let col = |tau: f64| -> f64 { kernels_at(&roots, tau).map_or(f64::NAN, |k| real_rows(&k)[i][2]) };
            let quad = |f: &dyn Fn(f64) -> f64| {
                adaptive_gk_real(f, 0.0, h, 0.0, 1e-13, 2_000).map_err(|e| NonlinearError::Quadrature {
                    r,
                    estimate: e.estimate,
                })
            };
            w0[i] = quad(&col)?;
            w1[i] = quad(&|tau: f64| col(tau) * (h - tau) / h)?;
        }
        Ok(Self { phi, w0, w1 })
    }
}

/// Source term of a step.
pub enum Source<'a> {
    None,
    /// The quadratic nonlinearity `F(ψ)`.
    Nonlinear,
    /// Prescribed forcing `f̂(t)`.
    External(&'a dyn Fn(f64) -> Vec<C>),
}

/// Precomputed propagators for a fixed grid, model and step.
#[derive(Debug, Clone)]
pub struct Stepper {
    pub grid: TorusGrid,
    pub params: ModelParams,
    pub dt: f64,
    steps: HashMap<u64, ShellStep>,
}

impl Stepper {
    pub fn new(grid: &TorusGrid, params: &ModelParams, dt: f64) -> Result<Self, NonlinearError> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(NonlinearError::Config(format!("time step must be positive, got {dt}")));
        }
        let mut shells: Vec<u64> = grid
            .shells
            .iter()
            .zip(&grid.mask)
            .filter(|(_, keep)| **keep)
            .map(|(s, _)| *s)
            .collect();
        shells.sort_unstable();
        shells.dedup();
        let steps = shells
            .iter()
            .map(|s| Ok((*s, ShellStep::new(params, grid.shell_radius(*s), dt)?)))
            .collect::<Result<_, NonlinearError>>()?;
        Ok(Self {
            grid: grid.clone(),
            params: *params,
            dt,
            steps,
        })
    }

    /// Applies the homogeneous flow plus `W₀f₀ + W₁(f₁ - f₀)`, the exact Duhamel
    /// term for a source linear in time across the step.
    fn advance(&self, state: &NonlinearState, f0: Option<&[C]>, f1: Option<&[C]>) -> NonlinearState {
        let mut out = NonlinearState::zero(&self.grid);
        out.t = state.t + self.dt;
        for idx in 0..self.grid.len() {
            if !self.grid.mask[idx] {
                continue;
            }
            let s = &self.steps[&self.grid.shells[idx]];
            let y = [state.fields[0][idx], state.fields[1][idx], state.fields[2][idx]];
            let a = f0.map_or(C::new(0.0, 0.0), |f| f[idx]);
            let b = f1.map_or(a, |f| f[idx]) - a;
            for i in 0..3 {
                let p = s.phi[i];
                out.fields[i][idx] = y[0] * p[0] + y[1] * p[1] + y[2] * p[2] + a * s.w0[i] + b * s.w1[i];
            }
        }
        out
    }

    /// One exact step of the linear model.
    pub fn linear_step(&self, state: &NonlinearState) -> NonlinearState {
        self.advance(state, None, None)
    }

    fn source(&self, src: &Source<'_>, state: &NonlinearState) -> Option<Vec<C>> {
        match src {
            Source::None => None,
            Source::Nonlinear => Some(nonlinearity_f(&self.grid, state.psi(), state.psi_t(), &self.params)),
            Source::External(f) => Some(f(state.t)),
        }
    }

    /// Second-order exponential Runge–Kutta step (exact linear part, source
    /// interpolated linearly between the step start and a predictor stage).
    pub fn duhamel_step(&self, state: &NonlinearState, src: &Source<'_>) -> Result<NonlinearState, NonlinearError> {
        let f0 = self.source(src, state);
        let Some(f0) = f0 else {
            return Ok(self.linear_step(state));
        };
        let stage = self.advance(state, Some(&f0), None);
        let f1 = self.source(src, &stage).expect("same source kind");
        let next = self.advance(state, Some(&f0), Some(&f1));
        if !next.is_finite() {
            return Err(NonlinearError::NotFinite { t: next.t });
        }
        Ok(next)
    }

    /// Step with a source sampled at both ends of the step.
    pub fn forced_step(&self, state: &NonlinearState, f0: &[C], f1: &[C]) -> NonlinearState {
        self.advance(state, Some(f0), Some(f1))
    }
}

/// Convenience wrapper building a [`Stepper`] for a single homogeneous step.
pub fn linear_step(
    grid: &TorusGrid,
    state: &NonlinearState,
    params: &ModelParams,
    dt: f64,
) -> Result<NonlinearState, NonlinearError> {
    Ok(Stepper::new(grid, params, dt)?.linear_step(state))
}

/// Convenience wrapper building a [`Stepper`] for a single nonlinear step.
pub fn duhamel_step(
    grid: &TorusGrid,
    state: &NonlinearState,
    params: &ModelParams,
    dt: f64,
) -> Result<NonlinearState, NonlinearError> {
    Stepper::new(grid, params, dt)?.duhamel_step(state, &Source::Nonlinear)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phase_solver::evolve_mode;
    use std::f64::consts::PI;

    fn sample_state(grid: &TorusGrid, eps: f64) -> NonlinearState {
        let mut s = NonlinearState::zero(grid);
        s.fields[0] = grid.sample(|x| eps * (x[0].cos() + 0.5 * (2.0 * x[0]).sin()));
        s.fields[1] = grid.sample(|x| 0.3 * eps * x[0].cos());
        s.fields[2] = grid.sample(|x| -0.2 * eps * (3.0 * x[0]).cos());
        s
    }

    #[test]
    fn f_of_cosine_matches_symbolic() {
        let p = ModelParams::default();
        let g = TorusGrid::new(1, 256, 2.0 * PI).unwrap();
        let eps = 0.7;
        let s = sample_state(&g, 0.0);
        let psi = g.sample(|x| eps * x[0].cos());
        let f = g.inverse(&nonlinearity_f(&g, &psi, &s.fields[1], &p));
        for i in 0..g.len() {
            let x = g.point(i)[0];
            let want = eps * eps * ((p.gamma() - 1.0) * x.cos().powi(2) - 2.0 * x.sin().powi(2));
            assert!((f[i] - want).abs() < 1e-10, "{x}: {} vs {want}", f[i]);
        }
    }

    #[test]
    fn f_vanishes_on_constants_and_zero() {
        let p = ModelParams::default();
        let g = TorusGrid::new(2, 16, 2.0 * PI).unwrap();
        let c = g.sample(|_| 3.0);
        let zero = vec![C::new(0.0, 0.0); g.len()];
        assert!(nonlinearity_f(&g, &c, &c, &p).iter().all(|v| v.norm() < 1e-13));
        assert!(nonlinearity_f(&g, &zero, &zero, &p).iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn f_is_quadratic_and_dealiased() {
        let p = ModelParams::default();
        let g = TorusGrid::new(1, 64, 2.0 * PI).unwrap();
        let s = sample_state(&g, 1.0);
        let base = nonlinearity_f(&g, s.psi(), s.psi_t(), &p);
        let n0 = g.l2_norm(&base);
        for eps in [1e-3, 0.5, 7.0] {
            let a: Vec<C> = s.psi().iter().map(|c| c * eps).collect();
            let b: Vec<C> = s.psi_t().iter().map(|c| c * eps).collect();
            let f = nonlinearity_f(&g, &a, &b, &p);
            assert!((g.l2_norm(&f) - eps * eps * n0).abs() <= 1e-12 * eps * eps * n0);
            assert!(f.iter().zip(&g.mask).all(|(v, k)| *k || v.norm() == 0.0));
        }
    }

    #[test]
    fn linear_flow_is_exact_and_composes() {
        let p = ModelParams::default();
        let g = TorusGrid::new(1, 32, 2.0 * PI).unwrap();
        let s0 = sample_state(&g, 1.0);
        let one = Stepper::new(&g, &p, 0.05).unwrap();
        let two = Stepper::new(&g, &p, 0.1).unwrap();
        let a = one.linear_step(&one.linear_step(&s0));
        let b = two.linear_step(&s0);
        for l in 0..3 {
            for (x, y) in a.fields[l].iter().zip(&b.fields[l]) {
                assert!((x - y).norm() < 1e-10);
            }
        }
        let mut s = s0.clone();
        for _ in 0..200 {
            s = one.linear_step(&s);
        }
        for idx in 0..g.len() {
            let r = g.shell_radius(g.shells[idx]);
            let data = [s0.fields[0][idx], s0.fields[1][idx], s0.fields[2][idx]];
            let want = evolve_mode(&p, data, r, s.t).unwrap();
            for l in 0..3 {
                assert!((s.fields[l][idx] - want[l]).norm() < 1e-9, "mode {idx}");
            }
        }
        assert!(g.conjugate_defect(s.psi()) < 1e-12);
    }

    #[test]
    fn mean_mode_is_polynomial() {
        let p = ModelParams::default();
        let g = TorusGrid::new(1, 16, 2.0 * PI).unwrap();
        let mut s = NonlinearState::zero(&g);
        s.fields = [0.5, -1.0, 2.0].map(|v| {
            let mut c = vec![C::new(0.0, 0.0); g.len()];
            c[0] = C::new(v, 0.0);
            c
        });
        let st = Stepper::new(&g, &p, 0.25).unwrap();
        let f: Vec<C> = (0..g.len())
            .map(|i| C::new(if i == 0 { 3.0 } else { 0.0 }, 0.0))
            .collect();
        for _ in 0..8 {
            s = st.forced_step(&s, &f, &f);
        }
        let t: f64 = 2.0;
        let want = 0.5 - t + t * t + 0.5 * t.powi(3);
        assert!((s.fields[0][0].re - want).abs() < 1e-12);
    }

    #[test]
    fn zero_source_matches_linear() {
        let p = ModelParams::default();
        let g = TorusGrid::new(1, 32, 2.0 * PI).unwrap();
        let st = Stepper::new(&g, &p, 1e-2).unwrap();
        let s0 = sample_state(&g, 1.0);
        let zero = vec![C::new(0.0, 0.0); g.len()];
        let f = |_t: f64| zero.clone();
        let a = st.duhamel_step(&s0, &Source::External(&f)).unwrap();
        assert_eq!(a, st.linear_step(&s0));
        let z = NonlinearState::zero(&g);
        assert_eq!(st.duhamel_step(&z, &Source::Nonlinear).unwrap().fields, z.fields);
    }
}
