//! Radial Gaussian initial data with closed-form transforms and norms.
//!
//! Transforms use the unitary convention `f̂(ξ) = (2π)^{-n/2}∫f(x)e^{-ix·ξ}dx`,
//! so `P_f = (2π)^{n/2} f̂(0)` and Plancherel is an isometry.

use super::grid::sphere_measure;
use super::NormError;
use crate::quad::adaptive_gk_real;
use statrs::function::gamma::gamma;
use std::f64::consts::PI;

/// One term `a·exp(-|x|²/(2σ²))`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussTerm {
    pub amplitude: f64,
    pub width: f64,
}

impl GaussTerm {
    pub fn new(amplitude: f64, width: f64) -> Self {
        Self { amplitude, width }
    }
}

/// How the third datum is specified.
#[derive(Debug, Clone, PartialEq)]
pub enum ThirdDatum {
    Gaussian(Vec<GaussTerm>),
    /// `ψ₂ = c₀Δψ₀ + c₁Δψ₁`, i.e. `ψ̂₂ = -r²(c₀ψ̂₀ + c₁ψ̂₁)`.
    Laplacian {
        c0: f64,
        c1: f64,
    },
}

/// Initial data `(ψ₀, ψ₁, ψ₂)` built from radial Gaussians in ℝⁿ.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianData {
    pub n: usize,
    pub psi0: Vec<GaussTerm>,
    pub psi1: Vec<GaussTerm>,
    pub psi2: ThirdDatum,
}

fn check_terms(terms: &[GaussTerm]) -> Result<(), NormError> {
    for t in terms {
        if !(t.width > 0.0) || !t.width.is_finite() || !t.amplitude.is_finite() {
            return Err(NormError::BadData(format!(
                "Gaussian term needs finite amplitude and positive width, got ({}, {})",
                t.amplitude, t.width
            )));
        }
    }
    Ok(())
}

impl GaussianData {
    pub fn new(n: usize, psi0: Vec<GaussTerm>, psi1: Vec<GaussTerm>, psi2: ThirdDatum) -> Result<Self, NormError> {
        if n == 0 {
            return Err(NormError::Dimension(n));
        }
        check_terms(&psi0)?;
        check_terms(&psi1)?;
        if let ThirdDatum::Gaussian(t) = &psi2 {
            check_terms(t)?;
        }
        Ok(Self { n, psi0, psi1, psi2 })
    }

    /// One Gaussian per datum, `(amplitude, width)` pairs.
    pub fn single(n: usize, terms: [(f64, f64); 3]) -> Result<Self, NormError> {
        let g = |(a, s): (f64, f64)| vec![GaussTerm::new(a, s)];
        Self::new(n, g(terms[0]), g(terms[1]), ThirdDatum::Gaussian(g(terms[2])))
    }

    pub fn zero(n: usize) -> Self {
        Self {
            n,
            psi0: vec![],
            psi1: vec![],
            psi2: ThirdDatum::Gaussian(vec![]),
        }
    }

    pub fn with_third(&self, psi2: ThirdDatum) -> Self {
        Self { psi2, ..self.clone() }
    }

    fn terms(&self, j: usize) -> Option<&[GaussTerm]> {
        match (j, &self.psi2) {
            (0, _) => Some(&self.psi0),
            (1, _) => Some(&self.psi1),
            (2, ThirdDatum::Gaussian(t)) => Some(t),
            _ => None,
        }
    }

    fn gauss_hat(&self, terms: &[GaussTerm], r: f64) -> f64 {
        let n = self.n as i32;
        terms
            .iter()
            .map(|g| g.amplitude * g.width.powi(n) * (-0.5 * g.width * g.width * r * r).exp())
            .sum()
    }

    /// `ψ̂ⱼ(r)`.
    pub fn hat(&self, j: usize, r: f64) -> f64 {
        match self.terms(j) {
            Some(t) => self.gauss_hat(t, r),
            None => {
                let ThirdDatum::Laplacian { c0, c1 } = self.psi2 else {
                    unreachable!()
                };
                -r * r * (c0 * self.hat(0, r) + c1 * self.hat(1, r))
            }
        }
    }

    pub fn hats(&self, r: f64) -> [f64; 3] {
        [self.hat(0, r), self.hat(1, r), self.hat(2, r)]
    }

    /// `ψⱼ` as a function of `|x|`.
    pub fn physical(&self, j: usize, rho: f64) -> f64 {
        let gauss = |terms: &[GaussTerm], lap: bool| -> f64 {
            terms
                .iter()
                .map(|g| {
                    let s2 = g.width * g.width;
                    let e = g.amplitude * (-0.5 * rho * rho / s2).exp();
                    if lap {
                        e * (rho * rho / (s2 * s2) - self.n as f64 / s2)
                    } else {
                        e
                    }
                })
                .sum()
        };
        match self.terms(j) {
            Some(t) => gauss(t, false),
            None => {
                let ThirdDatum::Laplacian { c0, c1 } = self.psi2 else {
                    unreachable!()
                };
                c0 * gauss(&self.psi0, true) + c1 * gauss(&self.psi1, true)
            }
        }
    }

    /// `P_{ψⱼ} = ∫ψⱼ dx`.
    pub fn moment(&self, j: usize) -> f64 {
        (2.0 * PI).powf(0.5 * self.n as f64) * self.hat(j, 0.0)
    }

    /// `∫ r^{2s} ψ̂ⱼ(r)² dξ`, closed form for Gaussian sums.
    fn hs_squared(&self, j: usize, s: f64) -> f64 {
        let n = self.n as f64;
        let omega = sphere_measure(self.n);
        // ∫ r^{2s+n-1} e^{-S r²/2} dr = ½ (2/S)^{s+n/2} Γ(s+n/2)
        let moment = |big_s: f64, extra: f64| {
            let p = s + extra + 0.5 * n;
            0.5 * (2.0 / big_s).powf(p) * gamma(p)
        };
        let pairs = |a: &[GaussTerm], b: &[GaussTerm], extra: f64| -> f64 {
            let mut acc = 0.0;
            for x in a {
                for y in b {
                    let w = x.amplitude * y.amplitude * (x.width * y.width).powf(n);
                    acc += w * moment(x.width * x.width + y.width * y.width, extra);
                }
            }
            acc
        };
        let total = match self.terms(j) {
            Some(t) => pairs(t, t, 0.0),
            None => {
                let ThirdDatum::Laplacian { c0, c1 } = self.psi2 else {
                    unreachable!()
                };
                // |r²(c₀ψ̂₀ + c₁ψ̂₁)|² adds r⁴.
                c0 * c0 * pairs(&self.psi0, &self.psi0, 2.0)
                    + 2.0 * c0 * c1 * pairs(&self.psi0, &self.psi1, 2.0)
                    + c1 * c1 * pairs(&self.psi1, &self.psi1, 2.0)
            }
        };
        omega * total
    }

    pub fn l2_norm(&self, j: usize) -> f64 {
        self.hs_squared(j, 0.0).max(0.0).sqrt()
    }

    /// Homogeneous Sobolev norm `‖|ξ|^s ψ̂ⱼ‖_{L²}`.
    pub fn hs_norm(&self, j: usize, s: f64) -> f64 {
        self.hs_squared(j, s).max(0.0).sqrt()
    }

    fn single_signed(&self, j: usize) -> bool {
        self.terms(j)
            .is_some_and(|t| t.iter().all(|g| g.amplitude >= 0.0) || t.iter().all(|g| g.amplitude <= 0.0))
    }

    fn weighted_l1(&self, j: usize, weight_power: f64) -> f64 {
        let n = self.n as f64;
        let omega = sphere_measure(self.n);
        if self.single_signed(j) {
            // ∫ |x|^p e^{-|x|²/(2σ²)} dx = ω_n ½ (2σ²)^{(n+p)/2} Γ((n+p)/2)
            let t = self.terms(j).unwrap_or(&[]);
            return t
                .iter()
                .map(|g| {
                    let p = 0.5 * (n + weight_power);
                    g.amplitude.abs() * omega * 0.5 * (2.0 * g.width * g.width).powf(p) * gamma(p)
                })
                .sum();
        }
        let reach = self.max_width() * 40.0;
        let f = |rho: f64| rho.powf(n - 1.0 + weight_power) * self.physical(j, rho).abs();
        let v = adaptive_gk_real(f, 0.0, reach, 0.0, 1e-12, 4000).unwrap_or(f64::NAN);
        omega * v
    }

    fn max_width(&self) -> f64 {
        let mut all: Vec<&GaussTerm> = self.psi0.iter().chain(&self.psi1).collect();
        if let ThirdDatum::Gaussian(t) = &self.psi2 {
            all.extend(t);
        }
        all.iter().map(|g| g.width).fold(1e-300, f64::max)
    }

    pub fn l1_norm(&self, j: usize) -> f64 {
        self.weighted_l1(j, 0.0)
    }

    /// `∫(1+|x|)|ψⱼ| dx`.
    pub fn l11_norm(&self, j: usize) -> f64 {
        self.weighted_l1(j, 0.0) + self.weighted_l1(j, 1.0)
    }

    /// `‖ψⱼ‖_{L²} + ‖ψⱼ‖_{L^{1,1}}`.
    pub fn l2_l11_norm(&self, j: usize) -> f64 {
        self.l2_norm(j) + self.l11_norm(j)
    }

    pub fn is_zero(&self) -> bool {
        let zero = |t: &[GaussTerm]| t.iter().all(|g| g.amplitude == 0.0);
        let third = match &self.psi2 {
            ThirdDatum::Gaussian(t) => zero(t),
            ThirdDatum::Laplacian { .. } => true,
        };
        zero(&self.psi0) && zero(&self.psi1) && third
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_norms::{RadialGrid, Zone};

    fn sample() -> GaussianData {
        GaussianData::single(3, [(1.0, 1.0), (-0.5, 0.7), (2.0, 1.3)]).unwrap()
    }

    #[test]
    fn moment_matches_transform_at_zero() {
        let d = sample();
        for j in 0..3 {
            let want = (2.0 * PI).powf(1.5) * d.hat(j, 0.0);
            assert!((d.moment(j) - want).abs() < 1e-14 * want.abs());
        }
        assert!((d.moment(2) - 2.0 * (2.0 * PI).powf(1.5) * 1.3f64.powi(3)).abs() < 1e-12);
    }

    #[test]
    fn norms_match_quadrature() {
        for n in 1..=6 {
            let base = GaussianData::single(n, [(1.0, 1.0), (-0.5, 0.7), (2.0, 1.3)]).unwrap();
            let lap = base.with_third(ThirdDatum::Laplacian { c0: 1.0, c1: 4.0 / 3.0 });
            let grid = RadialGrid::with_defaults(n).unwrap();
            for d in [&base, &lap] {
                for j in 0..3 {
                    for s in [0.0, 1.0, 2.5] {
                        let q = grid
                            .integrate(Zone::All, |r| [r.powf(2.0 * s) * d.hat(j, r).powi(2)])
                            .unwrap()[0]
                            .sqrt();
                        let c = d.hs_norm(j, s);
                        assert!((q - c).abs() <= 1e-8 * c, "n={n} j={j} s={s} {q} {c}");
                    }
                    if !d.single_signed(j) {
                        continue;
                    }
                    let l1 = grid.integrate(Zone::All, |r| [d.physical(j, r).abs()]).unwrap()[0];
                    let l11 = grid
                        .integrate(Zone::All, |r| [(1.0 + r) * d.physical(j, r).abs()])
                        .unwrap()[0];
                    assert!((l1 - d.l1_norm(j)).abs() <= 1e-8 * l1, "n={n} j={j}");
                    assert!((l11 - d.l11_norm(j)).abs() <= 1e-8 * l11, "n={n} j={j}");
                }
            }
        }
    }

    #[test]
    fn signed_sum_has_zero_moment() {
        // Equal masses with different widths: P = 0 but the datum is nonzero.
        let n = 3;
        let (s1, s2) = (1.0f64, 2.0f64);
        let a2 = -(s1 / s2).powi(n as i32);
        let d = GaussianData::new(
            n,
            vec![],
            vec![],
            ThirdDatum::Gaussian(vec![GaussTerm::new(1.0, s1), GaussTerm::new(a2, s2)]),
        )
        .unwrap();
        assert!(d.moment(2).abs() < 1e-14);
        assert!(d.l1_norm(2) > 0.1);
    }

    #[test]
    fn low_frequency_data_bound() {
        for n in [1, 3, 5] {
            let d = GaussianData::single(n, [(1.0, 1.0), (-0.5, 0.7), (2.0, 1.3)]).unwrap();
            let conv = (2.0 * PI).powf(-0.5 * n as f64);
            for j in 0..3 {
                for k in 1..=100 {
                    let r = k as f64 / 100.0;
                    let bound = conv * (r * d.l11_norm(j) + d.moment(j).abs());
                    assert!(d.hat(j, r).abs() <= bound * (1.0 + 1e-12), "n={n} j={j} r={r}");
                }
            }
        }
    }

    #[test]
    fn rejects_nonpositive_width() {
        assert!(GaussianData::single(3, [(1.0, 0.0), (0.0, 1.0), (0.0, 1.0)]).is_err());
    }
}
