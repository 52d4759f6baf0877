//! The weighted time-convolution bound used to glue the decay estimates.

use super::NonlinearError;
use crate::quad::adaptive_gk_real;

/// `∫₀ᵗ (1+t-σ)^{-α₁}(1+σ)^{-α₂} dσ`.
pub fn weighted_convolution(t: f64, a1: f64, a2: f64) -> Result<f64, NonlinearError> {
    if !(t >= 0.0) || !(a1 > 0.0) || !(a2 > 0.0) {
        return Err(NonlinearError::Config(format!(
            "need t ≥ 0 and positive exponents, got t = {t}, α = ({a1}, {a2})"
        )));
    }
    let f = |s: f64| (1.0 + t - s).powf(-a1) * (1.0 + s).powf(-a2);
    let half = 0.5 * t;
    let mut total = 0.0;
    for (lo, hi) in [(0.0, half), (half, t)] {
        total += adaptive_gk_real(f, lo, hi, 0.0, 1e-12, 5_000).map_err(|e| NonlinearError::Quadrature {
            r: t,
            estimate: e.estimate,
        })?;
    }
    Ok(total)
}

/// Ratios `I(t)(1+t)^{min{α₁,α₂}}` over a time grid and their supremum, the
/// smallest constant for which the bound holds on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvolutionCheck {
    pub a1: f64,
    pub a2: f64,
    pub ratios: Vec<f64>,
    pub constant: f64,
}

impl ConvolutionCheck {
    /// The lemma's hypothesis `max{α₁, α₂} > 1`.
    pub fn hypothesis(&self) -> bool {
        self.a1.max(self.a2) > 1.0
    }
}

pub fn convolution_check(a1: f64, a2: f64, t_grid: &[f64]) -> Result<ConvolutionCheck, NonlinearError> {
    let m = a1.min(a2);
    let ratios = t_grid
        .iter()
        .map(|t| Ok(weighted_convolution(*t, a1, a2)? * (1.0 + t).powf(m)))
        .collect::<Result<Vec<_>, NonlinearError>>()?;
    let constant = ratios.iter().copied().fold(0.0, f64::max);
    Ok(ConvolutionCheck {
        a1,
        a2,
        ratios,
        constant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn closed_forms() {
        // α₁ = α₂ = 1: I(t) = 2 ln(1+t)/(2+t)
        for t in [0.5, 3.0, 100.0] {
            let got = weighted_convolution(t, 1.0, 1.0).unwrap();
            assert!((got - 2.0 * (1.0 + t).ln() / (2.0 + t)).abs() < 1e-12);
        }
        // α₁ = 2, α₂ → plain power: ∫₀ᵗ(1+t-σ)^{-2}dσ with α₂ = tiny is close to t/(1+t)
        assert_eq!(weighted_convolution(0.0, 2.0, 0.5).unwrap(), 0.0);
        assert!(weighted_convolution(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn bound_fails_without_hypothesis() {
        let t: Vec<f64> = (0..8).map(|k| 10f64.powi(k)).collect();
        let c = convolution_check(0.5, 0.5, &t).unwrap();
        assert!(!c.hypothesis());
        assert!(c.ratios.last().unwrap() > &(5.0 * c.ratios[2]));
    }
}
