//! Reference integrator for linear constant-coefficient mode equations
//! `y⁽ᴺ⁾ + c_{N-1} y⁽ᴺ⁻¹⁾ + … + c₀ y = f(t)`, independent of the root solver.

use super::PhaseError;
use crate::model::ModelParams;
use crate::quad::GaussLegendre;
use nalgebra::DMatrix;
use num_complex::Complex64;

type C = Complex64;

const RTOL: f64 = 1e-10;
const ATOL: f64 = 1e-24;
const EXP_STEPPING_FROM: f64 = 10.0;
const MAX_STEPS: usize = 20_000_000;

/// A linear mode equation in companion form.
///
/// The state is carried as `s_j = y⁽ʲ⁾ / ρʲ` with `ρ = max(1, max_j c_j^{1/(N-j)})`,
/// which keeps the companion entries of order one for every frequency.
#[derive(Debug, Clone)]
pub struct LinearModeOde {
    coeffs: Vec<f64>,
    rho: f64,
    /// Frequency label used in error reports.
    pub r: f64,
}

impl LinearModeOde {
    /// `coeffs[j]` multiplies `y⁽ʲ⁾`; the leading coefficient is 1.
    pub fn new(coeffs: Vec<f64>, r: f64) -> Self {
        let n = coeffs.len();
        assert!(n >= 1, "mode equation needs order at least one");
        let rho = coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| c.abs().powf(1.0 / (n - j) as f64))
            .fold(1.0, f64::max);
        Self { coeffs, rho, r }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    fn scale(&self, y: &[C]) -> Vec<C> {
        y.iter().enumerate().map(|(j, v)| v / self.rho.powi(j as i32)).collect()
    }

    fn unscale(&self, s: &[C]) -> Vec<C> {
        s.iter().enumerate().map(|(j, v)| v * self.rho.powi(j as i32)).collect()
    }

    fn rhs(&self, s: &[C], f: C, out: &mut [C]) {
        let n = self.order();
        for j in 0..n - 1 {
            out[j] = s[j + 1] * self.rho;
        }
        let rn = self.rho.powi(n as i32 - 1);
        let mut acc = f;
        for j in 0..n {
            acc -= s[j] * (self.coeffs[j] * self.rho.powi(j as i32));
        }
        out[n - 1] = acc / rn;
    }

    fn companion(&self) -> DMatrix<f64> {
        let n = self.order();
        let mut m = DMatrix::zeros(n, n);
        for j in 0..n - 1 {
            m[(j, j + 1)] = 1.0;
        }
        for j in 0..n {
            m[(n - 1, j)] = -self.coeffs[j] * self.rho.powi(j as i32 - n as i32);
        }
        m
    }

    /// Solution and its first `N-1` derivatives at each time of `t_grid`.
    ///
    /// Uses adaptive Dormand–Prince 5(4) unless `exponential` is set, in which
    /// case the linear part is propagated by matrix exponentials and the
    /// forcing by a Gauss–Legendre Duhamel sum on steps of width `2/ρ`.
    pub fn solve(
        &self,
        data: &[C],
        forcing: Option<&dyn Fn(f64) -> C>,
        t_grid: &[f64],
        exponential: bool,
    ) -> Result<Vec<Vec<C>>, PhaseError> {
        if data.len() != self.order() {
            panic!("data length {} does not match order {}", data.len(), self.order());
        }
        if t_grid.first() != Some(&0.0) || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(PhaseError::BadTimeGrid);
        }
        let mut s = self.scale(data);
        let mut out = vec![self.unscale(&s)];
        for w in t_grid.windows(2) {
            s = if exponential {
                self.exp_interval(s, forcing, w[0], w[1])
            } else {
                self.dopri_interval(s, forcing, w[0], w[1])?
            };
            out.push(self.unscale(&s));
        }
        Ok(out)
    }

    fn dopri_interval(
        &self,
        mut s: Vec<C>,
        forcing: Option<&dyn Fn(f64) -> C>,
        t0: f64,
        t1: f64,
    ) -> Result<Vec<C>, PhaseError> {
        let n = self.order();
        let f = |t: f64| forcing.map_or(C::new(0.0, 0.0), |g| g(t));
        let mut k = vec![vec![C::new(0.0, 0.0); n]; 7];
        let mut tmp = vec![C::new(0.0, 0.0); n];
        let mut t = t0;
        let mut h = (0.1 / self.rho).min(t1 - t0);
        let mut steps = 0usize;
        self.rhs(&s, f(t), &mut k[0]);
        while t < t1 {
            steps += 1;
            if steps > MAX_STEPS || h < 1e-15 * (1.0 + t.abs()) {
                return Err(PhaseError::OdeStepCollapse { r: self.r, t });
            }
            let last = t + h >= t1;
            if last {
                h = t1 - t;
            }
            for stage in 1..7 {
                for i in 0..n {
                    let mut acc = s[i];
                    for (j, a) in A[stage].iter().enumerate().take(stage) {
                        if *a != 0.0 {
                            acc += k[j][i] * (h * a);
                        }
                    }
                    tmp[i] = acc;
                }
                self.rhs(&tmp, f(t + CNODE[stage] * h), &mut k[stage]);
            }
            // Stage 7 is evaluated at the fifth-order solution (FSAL).
            let mut err = 0.0;
            for i in 0..n {
                let mut e = C::new(0.0, 0.0);
                for j in 0..7 {
                    e += k[j][i] * (h * E[j]);
                }
                let sc = ATOL + RTOL * s[i].norm().max(tmp[i].norm());
                err += (e.norm() / sc).powi(2);
            }
            let err = (err / n as f64).sqrt();
            if err <= 1.0 {
                t = if last { t1 } else { t + h };
                s.copy_from_slice(&tmp);
                k[0] = k[6].clone();
            }
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            h *= if err <= 1.0 { factor } else { factor.min(1.0) };
        }
        Ok(s)
    }

    fn exp_interval(&self, s: Vec<C>, forcing: Option<&dyn Fn(f64) -> C>, t0: f64, t1: f64) -> Vec<C> {
        let n = self.order();
        let m = self.companion();
        let propagate =
            |e: &DMatrix<f64>, v: &[C]| -> Vec<C> { (0..n).map(|i| (0..n).map(|j| v[j] * e[(i, j)]).sum()).collect() };
        let Some(g) = forcing else {
            let e = (&m * (self.rho * (t1 - t0))).exp();
            return propagate(&e, &s);
        };
        let steps = ((t1 - t0) * self.rho / 2.0).ceil().max(1.0) as usize;
        let h = (t1 - t0) / steps as f64;
        let e = (&m * (self.rho * h)).exp();
        let gl = GaussLegendre::cached(16);
        let nodes: Vec<f64> = gl.nodes.iter().map(|x| 0.5 * h * (x + 1.0)).collect();
        // Column n-1 of exp(ρ(h - s_i)M), the response to a unit forcing impulse.
        let cols: Vec<Vec<f64>> = nodes
            .iter()
            .map(|si| {
                let ei = (&m * (self.rho * (h - si))).exp();
                (0..n).map(|i| ei[(i, n - 1)]).collect()
            })
            .collect();
        let inject = 1.0 / self.rho.powi(n as i32 - 1);
        let mut s = s;
        for step in 0..steps {
            let ts = t0 + step as f64 * h;
            let mut next = propagate(&e, &s);
            for (q, si) in nodes.iter().enumerate() {
                let w = 0.5 * h * gl.weights[q] * inject;
                let fv = g(ts + si) * w;
                for i in 0..n {
                    next[i] += fv * cols[q][i];
                }
            }
            s = next;
        }
        s
    }
}

const CNODE: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// Integrates the (optionally forced) third-order mode equation at frequency `r`.
///
/// Returns `(ψ̂, ψ̂ₜ, ψ̂ₜₜ)` at each time of `t_grid`, which must start at 0.
/// Frequencies `r ≥ 10` are propagated with exact exponentials of the linear part.
pub fn ode_oracle(
    params: &ModelParams,
    data_hat: [C; 3],
    forcing: Option<&dyn Fn(f64) -> C>,
    r: f64,
    t_grid: &[f64],
) -> Result<Vec<[C; 3]>, PhaseError> {
    if !(r >= 0.0) || !r.is_finite() {
        return Err(PhaseError::BadFrequency(r));
    }
    let cb = params.cubic(r);
    let ode = LinearModeOde::new(vec![cb.a0, cb.a1, cb.a2], r);
    let traj = ode.solve(&data_hat, forcing, t_grid, r >= EXP_STEPPING_FROM)?;
    Ok(traj.into_iter().map(|v| [v[0], v[1], v[2]]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn damped_oscillator_matches_closed_form() {
        // y'' + 0.4 y' + 4 y = 0, y(0)=1, y'(0)=0
        let ode = LinearModeOde::new(vec![4.0, 0.4], 2.0);
        let grid = [0.0, 0.5, 3.0, 12.0];
        let w = (4.0f64 - 0.04).sqrt();
        for exponential in [false, true] {
            let traj = ode
                .solve(&[C::new(1.0, 0.0), C::new(0.0, 0.0)], None, &grid, exponential)
                .unwrap();
            for (t, v) in grid.iter().zip(&traj) {
                let exact = (-0.2 * t).exp() * ((w * t).cos() + 0.2 / w * (w * t).sin());
                assert!((v[0].re - exact).abs() < 1e-9, "t={t} exp={exponential}");
            }
        }
    }

    #[test]
    fn forced_first_order_equation() {
        // y' + 3y = cos t
        let ode = LinearModeOde::new(vec![3.0], 0.0);
        let f = |t: f64| C::new(t.cos(), 0.0);
        let grid = [0.0, 1.0, 4.0];
        let exact = |t: f64| (3.0 * t.cos() + t.sin() - 3.0 * (-3.0 * t).exp()) / 10.0;
        for exponential in [false, true] {
            let traj = ode.solve(&[C::new(0.0, 0.0)], Some(&f), &grid, exponential).unwrap();
            for (t, v) in grid.iter().zip(&traj) {
                assert!((v[0].re - exact(*t)).abs() < 1e-10, "t={t} exp={exponential}");
            }
        }
    }

    #[test]
    fn initial_state_is_returned_first() {
        let p = ModelParams::default();
        let d = [C::new(1.0, 0.0), C::new(0.0, 0.0), C::new(0.0, 0.0)];
        let traj = ode_oracle(&p, d, None, 3.0, &[0.0]).unwrap();
        assert_eq!(traj[0], d);
    }

    #[test]
    fn rejects_bad_grids() {
        let p = ModelParams::default();
        let d = [C::new(1.0, 0.0); 3];
        assert_eq!(ode_oracle(&p, d, None, 1.0, &[0.1, 1.0]), Err(PhaseError::BadTimeGrid));
        assert_eq!(
            ode_oracle(&p, d, None, 1.0, &[0.0, 1.0, 1.0]),
            Err(PhaseError::BadTimeGrid)
        );
    }

    #[test]
    fn exponential_and_adaptive_paths_agree_near_switch() {
        let p = ModelParams::default();
        let cb = p.cubic(9.0);
        let ode = LinearModeOde::new(vec![cb.a0, cb.a1, cb.a2], 9.0);
        let d = [C::new(1.0, 0.0), C::new(-2.0, 0.0), C::new(5.0, 0.0)];
        let grid = [0.0, 0.05, 0.7, 3.0];
        let a = ode.solve(&d, None, &grid, false).unwrap();
        let b = ode.solve(&d, None, &grid, true).unwrap();
        for (x, y) in a.iter().zip(&b) {
            for j in 0..3 {
                assert!((x[j] - y[j]).norm() < 1e-8 * (1.0 + y[j].norm()));
            }
        }
    }
}
