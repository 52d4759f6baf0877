//! Pointwise energy inequalities for the forced mode equation with data `(0, 0, û₂)`.

use super::expansion::solve_limit_mode;
use super::LimitError;
use crate::model::ModelParams;
use crate::phase_solver::ode_oracle;
use crate::quad::adaptive_gk_real;
use num_complex::Complex64;

type C = Complex64;

/// Relative tolerance on certificate margins.
pub const MARGIN_TOL: f64 = 1e-9;

/// Source term of the certified trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Forcing {
    None,
    /// `f̂(t) = κ(γ-1)r⁴ψ̂⁽⁰⁾(t)` for limit data `(ψ̂₀, ψ̂₁)`.
    LimitSource {
        psi0: f64,
        psi1: f64,
    },
}

impl Forcing {
    pub fn eval(&self, params: &ModelParams, r: f64, t: f64) -> f64 {
        match *self {
            Self::None => 0.0,
            Self::LimitSource { psi0, psi1 } => {
                let v = solve_limit_mode(psi0, psi1, params, r, t).map_or(f64::NAN, |x| x.0);
                params.kappa() * (params.gamma() - 1.0) * r.powi(4) * v
            }
        }
    }
}

/// The multiplier constants at one frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateConstants {
    pub k1: f64,
    /// `k₂, k₃` of the energy inequality.
    pub k2: f64,
    pub k3: f64,
    /// Numerator of the `|v̂|²` weight; bounded below by `k₁(1-k₁)²`.
    pub k4: f64,
    /// `|û|²` weight of the potential inequality, before the factor `r⁴`.
    pub k5: f64,
    /// `k₂, k₃` of the potential inequality.
    pub k2_potential: f64,
    pub k3_potential: f64,
}

impl CertificateConstants {
    pub fn new(params: &ModelParams, r: f64, k1: f64) -> Self {
        let (kappa, bnu, g, gt) = (params.kappa(), params.bnu(), params.gamma(), params.gamma_tilde());
        let r2 = r * r;
        let base = kappa * bnu * r2 + k1 * (1.0 - k1 + gt * r2);
        let k2 = base * r2 * r2;
        let k3 = kappa * (1.0 + k1 * g) / base;
        let k4 = k1 * (1.0 - k1).powi(2)
            + ((1.0 - k1) * (kappa * bnu + 3.0 * k1 * gt) - (kappa * (1.0 + k1 * g)).powi(2)) * r2
            + 2.0 * gt * (kappa * bnu + k1 * gt) * r2 * r2;
        let q = 1.0 - k1 + 2.0 * gt * r2;
        let k5 = base - (kappa * (1.0 + k1 * g)).powi(2) * r2 / q;
        let k3_potential = q / (kappa * (1.0 + k1 * g) * r2);
        let k2_potential = (kappa * (1.0 + k1 * g)).powi(2) * r2.powi(3) / q;
        Self {
            k1,
            k2,
            k3,
            k4,
            k5,
            k2_potential,
            k3_potential,
        }
    }

    /// Lower bound on `k₅` used by the potential inequality.
    pub fn k5_floor(&self, params: &ModelParams, r: f64) -> f64 {
        let k1 = self.k1;
        k1 * (1.0 - k1).powi(2) / (1.0 - k1 + 2.0 * params.gamma_tilde() * r * r)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CertificateRow {
    pub t: f64,
    /// `∫₀ᵗ |f̂|² ds`
    pub forcing_energy: f64,
    pub energy_lhs: f64,
    pub energy_rhs: f64,
    pub potential_lhs: f64,
    pub potential_rhs: f64,
}

impl CertificateRow {
    pub fn energy_margin(&self) -> f64 {
        self.energy_rhs - self.energy_lhs
    }
    pub fn potential_margin(&self) -> f64 {
        self.potential_rhs - self.potential_lhs
    }
    fn scaled(m: f64, a: f64, b: f64) -> f64 {
        m / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
    }
    /// Smallest margin relative to the larger side of its inequality.
    pub fn worst_scaled_margin(&self) -> f64 {
        Self::scaled(self.energy_margin(), self.energy_lhs, self.energy_rhs).min(Self::scaled(
            self.potential_margin(),
            self.potential_lhs,
            self.potential_rhs,
        ))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnergyCertificate {
    pub r: f64,
    pub u2: f64,
    pub constants: CertificateConstants,
    pub rows: Vec<CertificateRow>,
}

impl EnergyCertificate {
    pub fn worst_scaled_margin(&self) -> f64 {
        self.rows
            .iter()
            .map(CertificateRow::worst_scaled_margin)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn holds(&self) -> bool {
        self.worst_scaled_margin() >= -MARGIN_TOL
    }

    /// The first row whose margin falls below tolerance.
    pub fn first_violation(&self) -> Option<&CertificateRow> {
        self.rows.iter().find(|r| r.worst_scaled_margin() < -MARGIN_TOL)
    }
}

/// Evaluates both energy inequalities along the oracle trajectory with data `(0, 0, u2)`.
///
/// Energy inequality:
/// `|û_tt + bνr²û_t + k₁r²û|² + k₁(1-k₁)r⁴|û + k₃û_t|² + k₁(1-k₁)²r²/((κbν+k₁γ̃)r² + k₁(1-k₁))|û_t|²
///  ≤ |û₂|² + (2+γk₁)/(2κγr²) ∫|f̂|²`.
///
/// Potential inequality:
/// `|û|² ≤ (1-k₁+2γ̃r²)/(k₁(1-k₁)²r⁴)|û₂|² + (1-k₁+2γ̃r²)(2+γk₁)/(2κk₁(1-k₁)²γr⁶) ∫|f̂|²`.
pub fn energy_certificate_check(
    params: &ModelParams,
    u2: f64,
    forcing: Forcing,
    r: f64,
    t_grid: &[f64],
    k1: f64,
) -> Result<EnergyCertificate, LimitError> {
    if !(k1 > 0.0 && k1 < 1.0) {
        return Err(LimitError::BadK1(k1));
    }
    if !(r > 0.0) || !r.is_finite() {
        return Err(LimitError::BadFrequency(r));
    }
    let f = |t: f64| forcing.eval(params, r, t);
    let fc = |t: f64| C::new(f(t), 0.0);
    let src: Option<&dyn Fn(f64) -> C> = match forcing {
        Forcing::None => None,
        _ => Some(&fc),
    };
    let traj = ode_oracle(
        params,
        [C::new(0.0, 0.0), C::new(0.0, 0.0), C::new(u2, 0.0)],
        src,
        r,
        t_grid,
    )?;
    let k = CertificateConstants::new(params, r, k1);
    let (kappa, bnu, g, gt) = (params.kappa(), params.bnu(), params.gamma(), params.gamma_tilde());
    let r2 = r * r;
    let q = 1.0 - k1 + 2.0 * gt * r2;
    let v_weight = k1 * (1.0 - k1).powi(2) * r2 / ((kappa * bnu + k1 * gt) * r2 + k1 * (1.0 - k1));
    let f_energy = (2.0 + g * k1) / (2.0 * kappa * g * r2);
    let u2_potential = q / (k1 * (1.0 - k1).powi(2) * r2 * r2);
    let f_potential = q * (2.0 + g * k1) / (2.0 * kappa * k1 * (1.0 - k1).powi(2) * g * r2.powi(3));
    let mut acc = 0.0;
    let mut rows = Vec::with_capacity(t_grid.len());
    for (i, (t, y)) in t_grid.iter().zip(&traj).enumerate() {
        if i > 0 && !matches!(forcing, Forcing::None) {
            let t0 = t_grid[i - 1];
            acc +=
                adaptive_gk_real(|s| f(s).powi(2), t0, *t, 0.0, 1e-13, 10_000).map_err(|e| LimitError::Quadrature {
                    r,
                    t: *t,
                    estimate: e.estimate,
                })?;
        }
        let (u, v, w) = (y[0], y[1], y[2]);
        let energy_lhs = (w + bnu * r2 * v + k1 * r2 * u).norm_sqr()
            + k1 * (1.0 - k1) * r2 * r2 * (u + k.k3 * v).norm_sqr()
            + v_weight * v.norm_sqr();
        rows.push(CertificateRow {
            t: *t,
            forcing_energy: acc,
            energy_lhs,
            energy_rhs: u2 * u2 + f_energy * acc,
            potential_lhs: u.norm_sqr(),
            potential_rhs: u2_potential * u2 * u2 + f_potential * acc,
        });
    }
    Ok(EnergyCertificate {
        r,
        u2,
        constants: k,
        rows,
    })
}
