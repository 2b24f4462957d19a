use serde::Serialize;

use crate::error::{Error, Result};

/// Periodic density `h(start + qT + ρ) = profile(ρ)` for `x ≥ start`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PeriodicTail {
    pub period: f64,
    /// Steps `(a, b, height)` with `0 ≤ a < b ≤ period`; gaps have density 0.
    pub profile: Vec<(f64, f64, f64)>,
    pub start: f64,
    pub per_period_mass: f64,
    #[serde(skip)]
    pub(crate) h_start: f64,
    #[serde(skip)]
    pieces: Vec<Piece>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Piece {
    lo: f64,
    hi: f64,
    h: f64,
    cum: f64,
}

impl PeriodicTail {
    pub fn new(period: f64, profile: Vec<(f64, f64, f64)>, start: f64) -> Result<Self> {
        if !(period.is_finite() && period > 0.0) {
            return Err(Error::invalid(format!("period must be positive, got {period}")));
        }
        if !(start.is_finite() && start >= 0.0) {
            return Err(Error::invalid(format!("periodic start must be ≥ 0, got {start}")));
        }
        let mut steps = profile.clone();
        steps.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut pieces = Vec::with_capacity(2 * steps.len() + 1);
        let mut cum = 0.0;
        let mut at = 0.0;
        for &(a, b, h) in &steps {
            if !(a >= 0.0 && a < b && b <= period && h.is_finite() && h >= 0.0) {
                return Err(Error::invalid(format!(
                    "profile step ({a}, {b}, {h}) must satisfy 0 ≤ a < b ≤ T and height ≥ 0"
                )));
            }
            if a < at {
                return Err(Error::invalid(format!("profile steps overlap at {a}")));
            }
            if a > at {
                pieces.push(Piece { lo: at, hi: a, h: 0.0, cum });
            }
            pieces.push(Piece { lo: a, hi: b, h, cum });
            cum += h * (b - a);
            at = b;
        }
        if at < period {
            pieces.push(Piece { lo: at, hi: period, h: 0.0, cum });
        }
        if !(cum > 0.0) {
            return Err(Error::invalid("periodic profile must have positive mass per period"));
        }
        Ok(Self { period, profile, start, per_period_mass: cum, h_start: 0.0, pieces })
    }

    fn partial(&self, rem: f64) -> f64 {
        if rem >= self.period {
            return self.per_period_mass;
        }
        let j = self.pieces.partition_point(|p| p.lo <= rem).saturating_sub(1);
        let p = &self.pieces[j];
        p.cum + p.h * (rem - p.lo).max(0.0)
    }

    fn split(&self, x: f64) -> (f64, f64) {
        let d = (x - self.start).max(0.0);
        let q = (d / self.period).floor();
        let rem = (d - q * self.period).clamp(0.0, self.period);
        (q, rem)
    }

    pub(crate) fn h(&self, x: f64) -> f64 {
        let (q, rem) = self.split(x);
        self.h_start + self.per_period_mass * (q + self.partial(rem) / self.per_period_mass)
    }

    pub(crate) fn density(&self, x: f64) -> f64 {
        let (_, rem) = self.split(x);
        let j = self.pieces.partition_point(|p| p.lo <= rem).saturating_sub(1);
        self.pieces[j].h
    }

    /// Lower bound for the density on `[lo, hi]`, `lo ≥ start`.
    pub(crate) fn density_inf(&self, lo: f64, hi: f64) -> f64 {
        let touching = |a: f64, b: f64| {
            self.pieces.iter().filter(move |p| p.lo <= b && p.hi >= a).map(|p| p.h)
        };
        if hi - lo >= self.period {
            return touching(0.0, self.period).fold(f64::INFINITY, f64::min);
        }
        let (_, a) = self.split(lo);
        let b = a + (hi - lo);
        let mut m = touching(a, b).fold(f64::INFINITY, f64::min);
        if b >= self.period {
            m = touching(0.0, b - self.period).fold(m, f64::min);
        }
        m
    }

    pub(crate) fn left_inverse(&self, t: f64) -> f64 {
        let p = self.per_period_mass;
        let u = t - self.h_start;
        let mut q = (u / p).floor();
        let mut v = u - q * p;
        if v <= 0.0 && q >= 1.0 {
            q -= 1.0;
            v += p;
        }
        if v > p {
            q += 1.0;
            v -= p;
        }
        let j = self.pieces.partition_point(|pc| pc.cum < v).saturating_sub(1);
        let pc = &self.pieces[j];
        let rho = if pc.h > 0.0 { (pc.lo + (v - pc.cum) / pc.h).min(pc.hi) } else { pc.lo };
        self.start + q * self.period + rho
    }

    pub(crate) fn right_inverse(&self, t: f64) -> f64 {
        let p = self.per_period_mass;
        let u = (t - self.h_start).max(0.0);
        let mut q = (u / p).floor();
        let mut v = u - q * p;
        if v >= p {
            q += 1.0;
            v -= p;
        }
        let v = v.max(0.0);
        let j = self.pieces.partition_point(|pc| pc.cum <= v).saturating_sub(1);
        let pc = &self.pieces[j];
        let rho = if pc.h > 0.0 { (pc.lo + (v - pc.cum) / pc.h).min(pc.hi) } else { pc.hi };
        self.start + q * self.period + rho
    }

    /// Elementary piece containing `x` (or ending at `x` when `left`).
    pub(crate) fn piece_at(&self, x: f64, left: bool) -> (f64, f64, bool) {
        let (mut q, mut rem) = self.split(x);
        if left && rem == 0.0 && q >= 1.0 {
            q -= 1.0;
            rem = self.period;
        }
        let j = if left {
            self.pieces.partition_point(|p| p.lo < rem).saturating_sub(1)
        } else {
            self.pieces.partition_point(|p| p.lo <= rem).saturating_sub(1)
        };
        let pc = &self.pieces[j];
        let base = self.start + q * self.period;
        (base + pc.lo, base + pc.hi, pc.h > 0.0)
    }

    pub(crate) fn piece_count(&self) -> usize {
        self.pieces.len()
    }

    pub(crate) fn breakpoints_in(&self, lo: f64, hi: f64, cap: usize, out: &mut Vec<f64>) {
        let lo = lo.max(self.start);
        if hi < lo {
            return;
        }
        let q0 = ((lo - self.start) / self.period).floor();
        let mut q = q0;
        while out.len() < cap {
            let base = self.start + q * self.period;
            if base > hi {
                break;
            }
            for pc in &self.pieces {
                let b = base + pc.lo;
                if b >= lo && b <= hi && out.len() < cap {
                    out.push(b);
                }
            }
            q += 1.0;
        }
    }
}
