use crate::error::{check_nonneg, Error, Result};
use crate::measure::DistributionMeasure;

fn check(y: f64, r: f64) -> Result<()> {
    check_nonneg("y", y)?;
    if !(r > y) {
        return Err(Error::domain(format!("need r > y, got r = {r}, y = {y}")));
    }
    Ok(())
}

fn ratio(mu: &DistributionMeasure, a: f64, b: f64) -> f64 {
    let (num, den) = (mu.h(a), mu.h(b));
    if !(den > 0.0) {
        return f64::INFINITY;
    }
    if num.is_finite() && den.is_finite() {
        return num / den;
    }
    (mu.ln_h(a) - mu.ln_h(b)).exp()
}

/// `H(r) / H(2r − y)`; `+∞` flags a vanishing denominator.
pub fn criterion_ratio(mu: &DistributionMeasure, y: f64, r: f64) -> Result<f64> {
    check(y, r)?;
    Ok(ratio(mu, r, 2.0 * r - y))
}

/// `H(r − y) / H(r)`; `+∞` flags a vanishing denominator.
pub fn shift_ratio(mu: &DistributionMeasure, y: f64, r: f64) -> Result<f64> {
    check(y, r)?;
    Ok(ratio(mu, r - y, r))
}
