//! Weighted measures `μ` through closed-form distribution functions, and finite
//! test measures `ν`.

mod distribution;
mod finite;
mod format;
mod periodic;
mod preset;
mod segment;

pub use distribution::{DistributionMeasure, InverseSide, Tail};
pub use finite::FiniteTestMeasure;
pub use format::{parse_measure, write_measure};
pub use periodic::PeriodicTail;
pub use preset::{preset, preset_from_spec, PeriodicParams, PRESET_NAMES};
pub use segment::{DensitySegment, SegmentKind};

use crate::error::{check_nonneg, Result};

/// `H(x) = μ([0, x])`.
pub fn h_eval(mu: &DistributionMeasure, x: f64) -> Result<f64> {
    mu.h_eval(x)
}

/// Generalized inverse of `H`; `+∞` when `t` is beyond the range of `H`.
pub fn h_inverse(mu: &DistributionMeasure, t: f64, side: InverseSide) -> Result<f64> {
    mu.h_inverse(t, side)
}

pub fn ball_mass(mu: &DistributionMeasure, x: f64, r: f64) -> Result<f64> {
    mu.ball_mass_checked(x, r)
}

pub fn r_zero(mu: &DistributionMeasure, x: f64) -> Result<f64> {
    check_nonneg("x", x)?;
    Ok(mu.r_zero(x))
}

pub fn nu_ball_mass(nu: &FiniteTestMeasure, x: f64, r: f64) -> Result<f64> {
    check_nonneg("x", x)?;
    check_nonneg("r", r)?;
    Ok(nu.ball_mass(x, r))
}
