//! Least-squares rate fits in log–log coordinates.

use super::NormError;

#[derive(Debug, Clone, PartialEq)]
pub struct DecayFit {
    pub t: Vec<f64>,
    pub y: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    /// RMS of the log-residuals.
    pub rms: f64,
    /// `y²/ln t` for each sample, present in log-factor mode.
    pub log_ratio: Option<Vec<f64>>,
}

impl DecayFit {
    /// `max/min` of the log-factor ratios, or `None` outside log-factor mode.
    pub fn log_ratio_spread(&self) -> Option<f64> {
        let r = self.log_ratio.as_ref()?;
        let (lo, hi) = r
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
        Some(hi / lo)
    }
}

/// Slope, intercept and residual RMS of `ln y` against `ln x`.
pub fn loglog_fit(x: &[f64], y: &[f64]) -> Result<(f64, f64, f64), NormError> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(NormError::Fit("need at least two paired samples".into()));
    }
    if x.iter().chain(y).any(|v| !(*v > 0.0) || !v.is_finite()) {
        return Err(NormError::Fit("samples must be positive and finite".into()));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let m = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / m;
    let my = ly.iter().sum::<f64>() / m;
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    if sxx == 0.0 {
        return Err(NormError::Fit("abscissae are all equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rms = (lx
        .iter()
        .zip(&ly)
        .map(|(a, b)| (b - intercept - slope * a).powi(2))
        .sum::<f64>()
        / m)
        .sqrt();
    Ok((slope, intercept, rms))
}

/// Fits `y ≈ C t^slope` over at least eight samples spanning two decades.
pub fn fit_power_law(samples: &[(f64, f64)], log_factor_mode: bool) -> Result<DecayFit, NormError> {
    if samples.len() < 8 {
        return Err(NormError::Fit(format!(
            "need at least 8 samples, got {}",
            samples.len()
        )));
    }
    let t: Vec<f64> = samples.iter().map(|s| s.0).collect();
    let y: Vec<f64> = samples.iter().map(|s| s.1).collect();
    let (lo, hi) = t
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), v| (lo.min(*v), hi.max(*v)));
    if !(hi / lo >= 100.0 * (1.0 - 1e-12)) {
        return Err(NormError::Fit("samples must span at least two decades".into()));
    }
    let (slope, intercept, rms) = loglog_fit(&t, &y)?;
    let log_ratio = log_factor_mode.then(|| t.iter().zip(&y).map(|(t, y)| y * y / t.ln()).collect());
    Ok(DecayFit {
        t,
        y,
        slope,
        intercept,
        rms,
        log_ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::logspace;

    #[test]
    fn exact_power_law() {
        let s: Vec<_> = logspace(1.0, 1e4, 12)
            .into_iter()
            .map(|t| (t, 3.0 * t.powf(-2.0)))
            .collect();
        let f = fit_power_law(&s, false).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-11);
        assert!(f.rms < 1e-12);
    }

    #[test]
    fn log_factor_mode() {
        let s: Vec<_> = logspace(1e2, 1e5, 10)
            .into_iter()
            .map(|t| (t, (2.0 * t.ln()).sqrt()))
            .collect();
        let f = fit_power_law(&s, true).unwrap();
        assert!((f.log_ratio_spread().unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn preconditions() {
        let few: Vec<_> = (1..5).map(|i| (i as f64, 1.0)).collect();
        assert!(fit_power_law(&few, false).is_err());
        let narrow: Vec<_> = (1..=10).map(|i| (i as f64, 1.0)).collect();
        assert!(fit_power_law(&narrow, false).is_err());
        let mut neg: Vec<_> = logspace(1.0, 1e3, 10).into_iter().map(|t| (t, t)).collect();
        neg[3].1 = -1.0;
        assert!(fit_power_law(&neg, false).is_err());
    }
}
