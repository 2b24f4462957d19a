use super::{LimitEstimate, SweepResult};
use crate::error::{Error, Result};

/// A sequence of values with uncertainty radii, ordered toward the limit.
pub trait LimitSeries {
    fn points(&self) -> Vec<(f64, f64)>;
}

impl LimitSeries for SweepResult {
    fn points(&self) -> Vec<(f64, f64)> {
        self.rows.iter().map(|r| (r.lambda_mass.mid(), r.lambda_mass.radius())).collect()
    }
}

impl LimitSeries for [f64] {
    fn points(&self) -> Vec<(f64, f64)> {
        self.iter().map(|&v| (v, 0.0)).collect()
    }
}

impl LimitSeries for Vec<f64> {
    fn points(&self) -> Vec<(f64, f64)> {
        self.as_slice().points()
    }
}

/// Min / max over the trailing `window` values, widened by their radii.
pub fn weak_limit_estimate<S: LimitSeries + ?Sized>(
    series: &S,
    window: usize,
    tolerance: f64,
) -> Result<LimitEstimate> {
    let pts = series.points();
    if window == 0 || pts.len() < window {
        return Err(Error::InsufficientRows { need: window.max(1), got: pts.len() });
    }
    let tail = &pts[pts.len() - window..];
    let liminf_est = tail.iter().map(|&(v, r)| v - r).fold(f64::INFINITY, f64::min);
    let limsup_est = tail.iter().map(|&(v, r)| v + r).fold(f64::NEG_INFINITY, f64::max);
    Ok(LimitEstimate {
        liminf_est,
        limsup_est,
        window,
        converged: limsup_est - liminf_est <= tolerance,
    })
}
