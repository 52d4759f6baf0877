//! Frozen study setups shared by the test suites and the experiment runner:
//! data choices, reference bands and sweep matrices.

use crate::model::{logspace, ModelParams};
use crate::spectral_norms::{GaussianData, MultiplierFamily, ThirdDatum};

/// Envelope constants used for the multiplier families.
pub const FAMILIES: [(&str, MultiplierFamily, f64); 4] = [
    ("power_s1", MultiplierFamily::Power { s: 1.0 }, 10.0),
    ("sine", MultiplierFamily::Sine, 1.0),
    ("inverse", MultiplierFamily::Inverse, 10.0),
    ("sine_squared", MultiplierFamily::SineSquared, 1.0),
];

/// Frozen `norm / law` bands over `t ∈ [10², 10⁵]`, indexed `[family][n - 1]`.
/// Measured once and widened by about ten percent; `None` where the family is undefined.
pub const LEMMA_BANDS: [[Option<(f64, f64)>; 6]; 4] = [
    [
        Some((0.089, 0.111)),
        Some((0.079, 0.099)),
        Some((0.061, 0.076)),
        Some((0.044, 0.056)),
        Some((0.031, 0.040)),
        Some((0.021, 0.028)),
    ],
    [
        Some((1.52, 1.95)),
        Some((1.18, 1.55)),
        Some((1.74, 2.19)),
        Some((1.31, 1.74)),
        Some((1.09, 1.59)),
        Some((0.93, 1.54)),
    ],
    [
        None,
        None,
        Some((1.42, 1.75)),
        Some((0.63, 0.78)),
        Some((0.32, 0.41)),
        Some((0.17, 0.22)),
    ],
    [
        Some((0.44, 0.57)),
        Some((0.87, 1.15)),
        Some((1.73, 2.44)),
        Some((1.59, 2.07)),
        Some((2.20, 2.74)),
        Some((1.50, 1.89)),
    ],
];

/// `(amplitude, width)` for `ψ₀, ψ₁, ψ₂` in the optimal-rate runs.
pub const OPTIMAL_DATA: [(f64, f64); 3] = [(0.0, 1.0), (0.0, 1.0), (1.0, 1.0)];

/// Generic data for the profile run; `ψ₁` is kept small because its heat-type
/// correction decays like `(κt)^{-n/4}` and only falls below the `ψ₂` error
/// for `t ≫ 10⁵` at `κ = 10⁻²`.
pub const PROFILE_DATA: [(f64, f64); 3] = [(1.0, 1.0), (0.01, 1.0), (1.0, 1.0)];

/// `(ψ₀, ψ₁)` for the Kuznetsov comparison, coupled through `ψ₂ = Δψ₀ + Δψ₁`.
pub const KUZNETSOV_DATA: [(f64, f64); 3] = [(1.0, 1.0), (0.5, 0.8), (0.0, 1.0)];

/// `(ψ₀, ψ₁)` Gaussians for the κ-sweeps; the third datum is always the consistent one.
pub const LIMIT_DATA: [(f64, f64); 2] = [(1.0, 1.0), (0.5, 1.0)];

pub const VISCOUS_DATA: [(f64, f64); 3] = [(1.0, 1.0), (0.5, 1.0), (-0.3, 1.0)];

pub fn limit_data(n: usize, params: &ModelParams) -> GaussianData {
    GaussianData::single(n, [LIMIT_DATA[0], LIMIT_DATA[1], (0.0, 1.0)])
        .expect("valid data")
        .with_third(ThirdDatum::Laplacian {
            c0: 1.0,
            c1: params.bnu(),
        })
}

/// Certificate matrix: frequencies, diffusivities and multiplier weights.
pub const CERT_R: [f64; 3] = [0.1, 1.0, 10.0];
pub const CERT_KAPPA: [f64; 2] = [1e-2, 1e-3];
pub const CERT_K1: [f64; 3] = [0.25, 0.5, 0.75];

/// Exponent pairs of the weighted-convolution check.
pub const CONVOLUTION_PAIRS: [(f64, f64); 3] = [(2.0, 0.5), (0.5, 2.0), (1.5, 1.5)];

/// Amplitudes scanned for the Picard contraction boundary.
pub fn picard_amplitudes() -> Vec<f64> {
    logspace(1e-2, 1e1, 7)
}

/// `t = 0` and 200 log-spaced times in `[10⁻³, 10⁴]` for certified trajectories.
pub fn certificate_time_grid() -> Vec<f64> {
    let mut g = vec![0.0];
    g.extend(logspace(1e-3, 1e4, 200));
    g
}
