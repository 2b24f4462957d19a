use serde::Serialize;

use crate::error::{Error, Result};

/// Closed-form density on one segment of a [`DistributionMeasure`](super::DistributionMeasure).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum SegmentKind {
    /// Density `c`.
    Constant { c: f64 },
    /// Density `a · e^{b (x − t_start)}`.
    Exponential { a: f64, b: f64 },
    /// Density `1 / (a x + c)`.
    Reciprocal { a: f64, c: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensitySegment {
    pub t_start: f64,
    pub kind: SegmentKind,
    /// `H(t_start)`.
    pub h_base: f64,
}

impl SegmentKind {
    pub(crate) fn validate(&self, t_start: f64) -> Result<()> {
        let fin = |v: f64| v.is_finite();
        match *self {
            SegmentKind::Constant { c } => {
                if !fin(c) || c < 0.0 {
                    return Err(Error::invalid(format!("constant density must be ≥ 0, got {c}")));
                }
            }
            SegmentKind::Exponential { a, b } => {
                if !fin(a) || a < 0.0 || !fin(b) {
                    return Err(Error::invalid(format!(
                        "exponential density needs a ≥ 0 and finite b, got a={a}, b={b}"
                    )));
                }
            }
            SegmentKind::Reciprocal { a, c } => {
                if !fin(a) || a <= 0.0 || !fin(c) || a * t_start + c <= 0.0 {
                    return Err(Error::invalid(format!(
                        "reciprocal density needs a > 0 and a·t_start + c > 0, got a={a}, c={c} at {t_start}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// True when the density vanishes identically on the segment.
    pub fn is_zero(&self) -> bool {
        match *self {
            SegmentKind::Constant { c } => c == 0.0,
            SegmentKind::Exponential { a, .. } => a == 0.0,
            SegmentKind::Reciprocal { .. } => false,
        }
    }

    pub fn density(&self, t_start: f64, x: f64) -> f64 {
        match *self {
            SegmentKind::Constant { c } => c,
            SegmentKind::Exponential { a, b } => a * (b * (x - t_start)).exp(),
            SegmentKind::Reciprocal { a, c } => 1.0 / (a * x + c),
        }
    }

    /// Mass of `[t_start, t_start + d]`.
    pub fn mass(&self, t_start: f64, d: f64) -> f64 {
        if d <= 0.0 {
            return 0.0;
        }
        match *self {
            SegmentKind::Constant { c } => c * d,
            SegmentKind::Exponential { a, b } => {
                if a == 0.0 {
                    0.0
                } else if b == 0.0 {
                    a * d
                } else {
                    a * (b * d).exp_m1() / b
                }
            }
            SegmentKind::Reciprocal { a, c } => (a * d / (a * t_start + c)).ln_1p() / a,
        }
    }

    /// Mass over `[t_start, ∞)`, possibly infinite.
    pub fn total_mass(&self) -> f64 {
        match *self {
            SegmentKind::Constant { c } => {
                if c > 0.0 {
                    f64::INFINITY
                } else {
                    0.0
                }
            }
            SegmentKind::Exponential { a, b } => {
                if a == 0.0 {
                    0.0
                } else if b < 0.0 {
                    a / -b
                } else {
                    f64::INFINITY
                }
            }
            SegmentKind::Reciprocal { .. } => f64::INFINITY,
        }
    }

    /// Smallest `d ≥ 0` with `mass(d) ≥ m`; `+∞` if the segment never accumulates `m`.
    /// Only meaningful for segments with positive density.
    pub fn inverse_mass(&self, t_start: f64, m: f64) -> f64 {
        if m <= 0.0 {
            return 0.0;
        }
        match *self {
            SegmentKind::Constant { c } => {
                if c > 0.0 {
                    m / c
                } else {
                    f64::INFINITY
                }
            }
            SegmentKind::Exponential { a, b } => {
                if a == 0.0 {
                    f64::INFINITY
                } else if b == 0.0 {
                    m / a
                } else {
                    let z = b * m / a;
                    if z <= -1.0 {
                        f64::INFINITY
                    } else {
                        z.ln_1p() / b
                    }
                }
            }
            SegmentKind::Reciprocal { a, c } => (a * t_start + c) * (a * m).exp_m1() / a,
        }
    }
}

impl DensitySegment {
    pub fn h_at(&self, x: f64) -> f64 {
        self.h_base + self.kind.mass(self.t_start, x - self.t_start)
    }
}
