//! Periodic box `[0, L)^d` with FFTs, spectral derivatives and the 2/3 dealiasing rule.

use super::NonlinearError;
use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

type C = Complex64;

/// Lattice of `M^d` points; spectral coefficients are stored in FFT order with
/// `f(x) = Σ_k ĉ_k e^{ik·x}`.
#[derive(Clone)]
pub struct TorusGrid {
    pub d: usize,
    pub m: usize,
    pub length: f64,
    /// Wavevector of each coefficient.
    pub wavevectors: Vec<[f64; 3]>,
    /// `|k|²` in lattice units (integer), used to share propagators between modes.
    pub shells: Vec<u64>,
    /// `true` for retained modes.
    pub mask: Vec<bool>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for TorusGrid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid")
            .field("d", &self.d)
            .field("m", &self.m)
            .field("length", &self.length)
            .finish_non_exhaustive()
    }
}

/// Default points per axis: 256, 64 and 32 for `d = 1, 2, 3`.
pub fn default_points(d: usize) -> usize {
    match d {
        1 => 256,
        2 => 64,
        _ => 32,
    }
}

impl TorusGrid {
    pub fn new(d: usize, m: usize, length: f64) -> Result<Self, NonlinearError> {
        if !(1..=3).contains(&d) {
            return Err(NonlinearError::Config(format!("dimension must be 1, 2 or 3, got {d}")));
        }
        if m < 4 || !m.is_power_of_two() {
            return Err(NonlinearError::Config(format!(
                "points per axis must be a power of two ≥ 4, got {m}"
            )));
        }
        if !(length > 0.0) || !length.is_finite() {
            return Err(NonlinearError::Config(format!(
                "box length must be positive, got {length}"
            )));
        }
        let total = m.pow(d as u32);
        let unit = 2.0 * PI / length;
        let keep = ((m - 1) / 3) as i64;
        let mut wavevectors = Vec::with_capacity(total);
        let mut shells = Vec::with_capacity(total);
        let mut mask = Vec::with_capacity(total);
        for idx in 0..total {
            let mut kv = [0.0; 3];
            let mut shell = 0u64;
            let mut kept = true;
            for (axis, k) in kv.iter_mut().enumerate().take(d) {
                let i = (idx / m.pow((d - 1 - axis) as u32)) % m;
                let s = signed_index(i, m);
                *k = unit * s as f64;
                shell += (s * s) as u64;
                kept &= s.abs() <= keep;
            }
            wavevectors.push(kv);
            shells.push(shell);
            mask.push(kept);
        }
        let mut planner = FftPlanner::new();
        Ok(Self {
            d,
            m,
            length,
            wavevectors,
            shells,
            mask,
            forward: planner.plan_fft_forward(m),
            inverse: planner.plan_fft_inverse(m),
        })
    }

    pub fn with_defaults(d: usize) -> Result<Self, NonlinearError> {
        Self::new(d, default_points(d), 2.0 * PI)
    }

    pub fn len(&self) -> usize {
        self.wavevectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.wavevectors.is_empty()
    }

    /// `|k|` of a shell.
    pub fn shell_radius(&self, shell: u64) -> f64 {
        2.0 * PI / self.length * (shell as f64).sqrt()
    }

    /// Coordinates of grid point `idx`.
    pub fn point(&self, idx: usize) -> [f64; 3] {
        let h = self.length / self.m as f64;
        let mut x = [0.0; 3];
        for (axis, xa) in x.iter_mut().enumerate().take(self.d) {
            *xa = h * ((idx / self.m.pow((self.d - 1 - axis) as u32)) % self.m) as f64;
        }
        x
    }

    fn transform(&self, data: &mut [C], fft: &Arc<dyn Fft<f64>>) {
        let m = self.m;
        let mut line = vec![C::new(0.0, 0.0); m];
        for axis in 0..self.d {
            let stride = m.pow((self.d - 1 - axis) as u32);
            let block = stride * m;
            for base in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    let start = base + offset;
                    for (j, v) in line.iter_mut().enumerate() {
                        *v = data[start + j * stride];
                    }
                    fft.process(&mut line);
                    for (j, v) in line.iter().enumerate() {
                        data[start + j * stride] = *v;
                    }
                }
            }
        }
    }

    /// Spectral coefficients of a real field.
    pub fn forward(&self, field: &[f64]) -> Vec<C> {
        let scale = 1.0 / self.len() as f64;
        let mut data: Vec<C> = field.iter().map(|v| C::new(*v, 0.0)).collect();
        self.transform(&mut data, &self.forward);
        data.iter_mut().for_each(|v| *v *= scale);
        data
    }

    /// Real field from spectral coefficients (the imaginary part is discarded).
    pub fn inverse(&self, coeffs: &[C]) -> Vec<f64> {
        let mut data = coeffs.to_vec();
        self.transform(&mut data, &self.inverse);
        data.into_iter().map(|v| v.re).collect()
    }

    pub fn dealias(&self, coeffs: &mut [C]) {
        for (c, keep) in coeffs.iter_mut().zip(&self.mask) {
            if !keep {
                *c = C::new(0.0, 0.0);
            }
        }
    }

    /// Samples `f` on the grid and returns its dealiased coefficients.
    pub fn sample<F: Fn(&[f64; 3]) -> f64>(&self, f: F) -> Vec<C> {
        let field: Vec<f64> = (0..self.len()).map(|i| f(&self.point(i))).collect();
        let mut c = self.forward(&field);
        self.dealias(&mut c);
        c
    }

    /// `∂_{x_axis}` applied spectrally; the Nyquist mode is dropped.
    pub fn partial(&self, coeffs: &[C], axis: usize) -> Vec<C> {
        let nyquist = PI * self.m as f64 / self.length;
        coeffs
            .iter()
            .zip(&self.wavevectors)
            .map(|(c, k)| {
                let ka = k[axis];
                if (ka.abs() - nyquist).abs() < 1e-9 * nyquist {
                    C::new(0.0, 0.0)
                } else {
                    c * C::new(0.0, ka)
                }
            })
            .collect()
    }

    pub fn laplacian(&self, coeffs: &[C]) -> Vec<C> {
        coeffs
            .iter()
            .zip(&self.wavevectors)
            .map(|(c, k)| -c * (k[0] * k[0] + k[1] * k[1] + k[2] * k[2]))
            .collect()
    }

    /// `‖|D|^p f‖_{L²}` by Parseval; `p = 0` gives the plain `L²` norm.
    pub fn homogeneous_norm(&self, coeffs: &[C], p: f64) -> f64 {
        let sum: f64 = coeffs
            .iter()
            .zip(&self.wavevectors)
            .map(|(c, k)| {
                let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
                let w = if p == 0.0 {
                    1.0
                } else if k2 == 0.0 {
                    0.0
                } else {
                    k2.powf(p)
                };
                w * c.norm_sqr()
            })
            .sum();
        (self.length.powi(self.d as i32) * sum).sqrt()
    }

    pub fn l2_norm(&self, coeffs: &[C]) -> f64 {
        self.homogeneous_norm(coeffs, 0.0)
    }

    /// `‖⟨D⟩^p f‖_{L²}`.
    pub fn sobolev_norm(&self, coeffs: &[C], p: f64) -> f64 {
        let sum: f64 = coeffs
            .iter()
            .zip(&self.wavevectors)
            .map(|(c, k)| (1.0 + k[0] * k[0] + k[1] * k[1] + k[2] * k[2]).powf(p) * c.norm_sqr())
            .sum();
        (self.length.powi(self.d as i32) * sum).sqrt()
    }

    /// Largest violation of `ĉ_{-k} = conj(ĉ_k)`.
    pub fn conjugate_defect(&self, coeffs: &[C]) -> f64 {
        let m = self.m;
        let mut worst = 0.0f64;
        for (idx, c) in coeffs.iter().enumerate() {
            let mut mirror = 0;
            for axis in 0..self.d {
                let stride = m.pow((self.d - 1 - axis) as u32);
                let i = (idx / stride) % m;
                mirror += ((m - i) % m) * stride;
            }
            worst = worst.max((c - coeffs[mirror].conj()).norm());
        }
        worst
    }
}

fn signed_index(i: usize, m: usize) -> i64 {
    if i <= m / 2 {
        i as i64
    } else {
        i as i64 - m as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for (d, m) in [(1, 256), (2, 64), (3, 16)] {
            let g = TorusGrid::new(d, m, 2.0 * PI).unwrap();
            let f: Vec<f64> = (0..g.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let back = g.inverse(&g.forward(&f));
            let scale = f.iter().map(|v| v * v).sum::<f64>().sqrt();
            let err = f.iter().zip(&back).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            assert!(err <= 1e-12 * scale, "d={d}: {err}");
            assert!(g.conjugate_defect(&g.forward(&f)) < 1e-14);
        }
    }

    #[test]
    fn mask_drops_top_third() {
        let g = TorusGrid::new(1, 256, 2.0 * PI).unwrap();
        let kept = g.mask.iter().filter(|k| **k).count();
        assert_eq!(kept, 2 * 85 + 1);
        let g3 = TorusGrid::new(3, 32, 2.0 * PI).unwrap();
        assert_eq!(g3.mask.iter().filter(|k| **k).count(), 21usize.pow(3));
    }

    #[test]
    fn derivatives_of_trig() {
        let g = TorusGrid::new(2, 32, 2.0 * PI).unwrap();
        let c = g.sample(|x| (2.0 * x[0]).sin() * x[1].cos());
        let dx = g.inverse(&g.partial(&c, 0));
        let lap = g.inverse(&g.laplacian(&c));
        for i in (0..g.len()).step_by(37) {
            let x = g.point(i);
            assert!((dx[i] - 2.0 * (2.0 * x[0]).cos() * x[1].cos()).abs() < 1e-12);
            assert!((lap[i] + 5.0 * (2.0 * x[0]).sin() * x[1].cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn parseval_norms() {
        let g = TorusGrid::new(1, 64, 2.0 * PI).unwrap();
        let c = g.sample(|x| 3.0 * (2.0 * x[0]).cos());
        assert!((g.l2_norm(&c) - 3.0 * PI.sqrt()).abs() < 1e-12);
        assert!((g.homogeneous_norm(&c, 1.0) - 6.0 * PI.sqrt()).abs() < 1e-12);
        assert!((g.sobolev_norm(&c, 1.0) - 3.0 * (5.0 * PI).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(TorusGrid::new(4, 32, 1.0).is_err());
        assert!(TorusGrid::new(1, 48, 1.0).is_err());
        assert!(TorusGrid::new(1, 32, 0.0).is_err());
    }
}
