//! Shared fixtures for the benchmarks.

use hlweak_core::measure::PRESET_NAMES;
use hlweak_core::{preset, DistributionMeasure, FiniteTestMeasure};

pub fn presets() -> Vec<(&'static str, DistributionMeasure)> {
    PRESET_NAMES.iter().map(|&n| (n, preset(n, None).unwrap())).collect()
}

/// `0.3 δ₀ + 0.2 δ₅ + step(1, 4, 1/6)`.
pub fn mixture() -> FiniteTestMeasure {
    FiniteTestMeasure::new(vec![(0.0, 0.3), (5.0, 0.2)], vec![(1.0, 4.0, 1.0 / 6.0)]).unwrap()
}

/// Evaluation points spread over several decades.
pub fn probe_points(n: usize) -> Vec<f64> {
    (0..n).map(|i| 1e-3 * 1e6f64.powf(i as f64 / (n - 1) as f64)).collect()
}
