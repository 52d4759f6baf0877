//! Model parameters, the characteristic cubic of the Fourier-side mode
//! equation and its roots.
//!
//! The mode equation at radial frequency `r = |ξ|` reads
//!
//! ```text
//! ψ''' + (δ+κ) r² ψ'' + (1 + γ̃ r²) r² ψ' + κ r⁴ ψ = 0,
//! δ = bν + (γ−1)κ,   γ̃ = γ bν κ,
//! ```
//!
//! and in the inviscid regime the same cubic with `bν = 0`.

mod roots;

pub use roots::{characteristic_roots, CharacteristicRoots};

use num_complex::Complex64;
use thiserror::Error;

/// Default threshold above which κ is flagged as outside the small-κ regime.
pub const DEFAULT_KAPPA_WARN: f64 = 0.1;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("parameter `{field}` = {value} outside admissible interval {interval}")]
    OutOfRange {
        field: &'static str,
        value: f64,
        interval: &'static str,
    },
    #[error("radial frequency r = {0} must be {1}")]
    BadFrequency(f64, &'static str),
    #[error("large-frequency discriminant (δ+κ)² − 4γbνκ = {0} is not positive")]
    Discriminant(f64),
    #[error("empty frequency grid")]
    EmptyGrid,
}

/// Structured regime warnings; they never block a computation.
#[derive(Debug, Clone, PartialEq)]
pub enum ParamWarning {
    KappaLarge { kappa: f64, threshold: f64 },
    DiscriminantNonpositive { value: f64 },
}

/// Physical and derived constants of the model.
///
/// The derived quantities δ and γ̃ are recomputed from the primary fields on
/// every access so they can never drift out of sync.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    kappa: f64,
    b: f64,
    nu: f64,
    gamma: f64,
    c0: f64,
    inviscid: bool,
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            kappa: 0.01,
            b: 4.0 / 3.0,
            nu: 1.0,
            gamma: 1.4,
            c0: 1.0,
            inviscid: false,
        }
    }
}

fn check(field: &'static str, value: f64, ok: bool, interval: &'static str) -> Result<(), ModelError> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(ModelError::OutOfRange { field, value, interval })
    }
}

/// Validates raw inputs and returns the parameter set.
pub fn derive_params(
    kappa: f64,
    b: f64,
    nu: f64,
    gamma: f64,
    c0: f64,
    inviscid: bool,
) -> Result<ModelParams, ModelError> {
    check("kappa", kappa, kappa > 0.0, "(0, ∞)")?;
    check("b", b, b > 0.0, "(0, ∞)")?;
    check("nu", nu, nu > 0.0, "(0, ∞)")?;
    check("gamma", gamma, gamma > 1.0 && gamma <= 5.0 / 3.0, "(1, 5/3]")?;
    check("c0", c0, c0 > 0.0, "(0, ∞)")?;
    Ok(ModelParams {
        kappa,
        b,
        nu,
        gamma,
        c0,
        inviscid,
    })
}

impl ModelParams {
    pub fn kappa(&self) -> f64 {
        self.kappa
    }
    pub fn b(&self) -> f64 {
        self.b
    }
    pub fn nu(&self) -> f64 {
        self.nu
    }
    pub fn gamma(&self) -> f64 {
        self.gamma
    }
    pub fn c0(&self) -> f64 {
        self.c0
    }
    pub fn is_inviscid(&self) -> bool {
        self.inviscid
    }

    /// Effective viscous product bν (zero in the inviscid regime).
    pub fn bnu(&self) -> f64 {
        if self.inviscid {
            0.0
        } else {
            self.b * self.nu
        }
    }

    /// Modified diffusivity of sound δ = bν + (γ−1)κ.
    pub fn delta(&self) -> f64 {
        self.bnu() + (self.gamma - 1.0) * self.kappa
    }

    /// γ̃ = γ bν κ.
    pub fn gamma_tilde(&self) -> f64 {
        self.gamma * self.bnu() * self.kappa
    }

    /// Prandtl number ν/κ.
    pub fn prandtl(&self) -> f64 {
        self.nu / self.kappa
    }

    pub fn with_kappa(&self, kappa: f64) -> Result<Self, ModelError> {
        derive_params(kappa, self.b, self.nu, self.gamma, self.c0, self.inviscid)
    }

    /// Same constants with the viscous product set to `bnu` by rescaling ν.
    pub fn with_bnu(&self, bnu: f64) -> Result<Self, ModelError> {
        derive_params(self.kappa, self.b, bnu / self.b, self.gamma, self.c0, self.inviscid)
    }

    pub fn with_inviscid(&self, inviscid: bool) -> Self {
        Self { inviscid, ..*self }
    }

    /// Large-frequency discriminant (δ+κ)² − 4γbνκ.
    pub fn large_freq_discriminant(&self) -> f64 {
        let s = self.delta() + self.kappa;
        s * s - 4.0 * self.gamma_tilde()
    }

    pub fn warnings(&self) -> Vec<ParamWarning> {
        self.warnings_with(DEFAULT_KAPPA_WARN)
    }

    pub fn warnings_with(&self, kappa_threshold: f64) -> Vec<ParamWarning> {
        let mut out = Vec::new();
        if self.kappa > kappa_threshold {
            out.push(ParamWarning::KappaLarge {
                kappa: self.kappa,
                threshold: kappa_threshold,
            });
        }
        let d = self.large_freq_discriminant();
        if !self.inviscid && d <= 0.0 {
            out.push(ParamWarning::DiscriminantNonpositive { value: d });
        }
        out
    }

    /// Coefficients of the monic characteristic cubic at frequency `r`.
    pub fn cubic(&self, r: f64) -> Cubic {
        let r2 = r * r;
        Cubic {
            a2: (self.delta() + self.kappa) * r2,
            a1: (1.0 + self.gamma_tilde() * r2) * r2,
            a0: self.kappa * r2 * r2,
        }
    }
}

/// Monic cubic λ³ + a2 λ² + a1 λ + a0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Cubic {
    pub a2: f64,
    pub a1: f64,
    pub a0: f64,
}

impl Cubic {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        ((z + self.a2) * z + self.a1) * z + self.a0
    }

    pub fn deriv(&self, z: Complex64) -> Complex64 {
        (z * 3.0 + 2.0 * self.a2) * z + self.a1
    }

    fn eval_real(&self, x: f64) -> (f64, f64) {
        let p = ((x + self.a2) * x + self.a1) * x + self.a0;
        let d = (3.0 * x + 2.0 * self.a2) * x + self.a1;
        (p, d)
    }
}

/// Leading small-frequency approximants `±ir − (δ/2)r²` and `−κr²`.
pub fn small_freq_expansion(params: &ModelParams, r: f64) -> Result<[Complex64; 3], ModelError> {
    if !(r > 0.0) {
        return Err(ModelError::BadFrequency(r, "positive"));
    }
    let re = -0.5 * params.delta() * r * r;
    Ok([
        Complex64::new(re, r),
        Complex64::new(re, -r),
        Complex64::new(-params.kappa() * r * r, 0.0),
    ])
}

/// Leading large-frequency approximants.
///
/// Viscous: `½(−(δ+κ) ± √disc) r²` and `−1/(γbν)`.
/// Inviscid: `±i r/√γ − (γ−1)/(2γ²κ)` and `−γκr²`.
pub fn large_freq_expansion(params: &ModelParams, r: f64) -> Result<[Complex64; 3], ModelError> {
    if !(r > 0.0) {
        return Err(ModelError::BadFrequency(r, "positive"));
    }
    let g = params.gamma();
    let k = params.kappa();
    if params.is_inviscid() {
        let re = -(g - 1.0) / (2.0 * g * g * k);
        let im = r / g.sqrt();
        return Ok([
            Complex64::new(re, im),
            Complex64::new(re, -im),
            Complex64::new(-g * k * r * r, 0.0),
        ]);
    }
    let disc = params.large_freq_discriminant();
    if disc <= 0.0 {
        return Err(ModelError::Discriminant(disc));
    }
    let s = params.delta() + k;
    let sq = disc.sqrt();
    let r2 = r * r;
    Ok([
        Complex64::new(0.5 * (-s + sq) * r2, 0.0),
        Complex64::new(0.5 * (-s - sq) * r2, 0.0),
        Complex64::new(-1.0 / (g * params.bnu()), 0.0),
    ])
}

/// Largest real part of any root over a grid of strictly positive frequencies.
pub fn stability_margin(params: &ModelParams, r_grid: &[f64]) -> Result<f64, ModelError> {
    if r_grid.is_empty() {
        return Err(ModelError::EmptyGrid);
    }
    let mut margin = f64::NEG_INFINITY;
    for &r in r_grid {
        if !(r > 0.0) {
            return Err(ModelError::BadFrequency(r, "strictly positive in a stability grid"));
        }
        let roots = characteristic_roots(params, r)?;
        for z in roots.roots {
            margin = margin.max(z.re);
        }
    }
    Ok(margin)
}

/// `n` log-spaced points between `lo` and `hi` inclusive.
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![lo];
    }
    let (a, b) = (lo.ln(), hi.ln());
    (0..n)
        .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
        .collect()
}
