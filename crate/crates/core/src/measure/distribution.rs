use serde::Serialize;

use super::periodic::PeriodicTail;
use super::segment::{DensitySegment, SegmentKind};
use crate::error::{check_nonneg, Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Tail {
    /// The last segment's closed form extends to `+∞`.
    Extend,
    Periodic(PeriodicTail),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum InverseSide {
    /// `inf{s ≥ 0 : H(s) ≥ t}`.
    Left,
    /// `sup{s ≥ 0 : H(s) ≤ t}`.
    Right,
}

/// Atomless measure on `[0, ∞)` with distribution function `H(x) = μ([0, x])`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistributionMeasure {
    segments: Vec<DensitySegment>,
    tail: Tail,
    unbounded: bool,
    sup_h: f64,
}

impl DistributionMeasure {
    /// Builds the measure from `(t_start, kind)` pairs, accumulating `h_base`.
    pub fn new(segments: Vec<(f64, SegmentKind)>, tail: Tail) -> Result<Self> {
        let mut tail = tail;
        let periodic_start = match &tail {
            Tail::Periodic(p) => Some(p.start),
            Tail::Extend => None,
        };
        if segments.is_empty() {
            if periodic_start != Some(0.0) {
                return Err(Error::invalid("at least one segment starting at 0 is required"));
            }
        } else if segments[0].0 != 0.0 {
            return Err(Error::invalid(format!(
                "first segment must start at 0, got {}",
                segments[0].0
            )));
        }
        let mut out: Vec<DensitySegment> = Vec::with_capacity(segments.len());
        for (i, &(t, kind)) in segments.iter().enumerate() {
            if !t.is_finite() {
                return Err(Error::invalid(format!("segment {i} has non-finite start {t}")));
            }
            if let Some(prev) = out.last() {
                if t <= prev.t_start {
                    return Err(Error::invalid(format!(
                        "segment starts must strictly increase ({} then {t})",
                        prev.t_start
                    )));
                }
            }
            kind.validate(t)?;
            let h_base = match out.last() {
                Some(prev) => prev.h_at(t),
                None => 0.0,
            };
            if !h_base.is_finite() {
                return Err(Error::invalid(format!("H overflows before segment {i} at {t}")));
            }
            out.push(DensitySegment { t_start: t, kind, h_base });
        }
        let (unbounded, sup_h) = match &mut tail {
            Tail::Periodic(p) => {
                if let Some(last) = out.last() {
                    if p.start <= last.t_start {
                        return Err(Error::invalid(format!(
                            "periodic tail start {} must follow the last segment start {}",
                            p.start, last.t_start
                        )));
                    }
                    p.h_start = last.h_at(p.start);
                } else {
                    p.h_start = 0.0;
                }
                (true, f64::INFINITY)
            }
            Tail::Extend => {
                let last = out.last().expect("nonempty");
                let sup = last.h_base + last.kind.total_mass();
                (sup.is_infinite(), sup)
            }
        };
        Ok(Self { segments: out, tail, unbounded, sup_h })
    }

    pub fn segments(&self) -> &[DensitySegment] {
        &self.segments
    }

    pub fn tail(&self) -> &Tail {
        &self.tail
    }

    /// Whether `H(x) → ∞`, derived from the tail kind.
    pub fn is_unbounded(&self) -> bool {
        self.unbounded
    }

    pub fn sup_h(&self) -> f64 {
        self.sup_h
    }

    pub(crate) fn require_unbounded(&self) -> Result<()> {
        if self.unbounded {
            Ok(())
        } else {
            Err(Error::Bounded)
        }
    }

    fn periodic(&self) -> Option<&PeriodicTail> {
        match &self.tail {
            Tail::Periodic(p) => Some(p),
            Tail::Extend => None,
        }
    }

    fn in_tail(&self, x: f64) -> bool {
        matches!(self.periodic(), Some(p) if x >= p.start)
    }

    fn segment_end(&self, i: usize) -> f64 {
        if i + 1 < self.segments.len() {
            self.segments[i + 1].t_start
        } else if let Some(p) = self.periodic() {
            p.start
        } else {
            f64::INFINITY
        }
    }

    fn segment_index(&self, x: f64) -> usize {
        self.segments
            .partition_point(|s| s.t_start <= x)
            .saturating_sub(1)
    }

    /// `H(x)`; negative `x` is clamped to 0.
    pub fn h(&self, x: f64) -> f64 {
        let x = x.max(0.0);
        if self.in_tail(x) {
            return self.periodic().unwrap().h(x);
        }
        if x.is_infinite() {
            return self.sup_h;
        }
        self.segments[self.segment_index(x)].h_at(x)
    }

    /// `ln H(x)`, still finite where `H(x)` overflows on an exponential segment.
    pub fn ln_h(&self, x: f64) -> f64 {
        let h = self.h(x);
        if h.is_finite() || self.in_tail(x) || x.is_infinite() {
            return h.ln();
        }
        let s = &self.segments[self.segment_index(x.max(0.0))];
        match s.kind {
            // H = h_base + (a/b)(e^{b d} − 1) and the exponential dominates.
            SegmentKind::Exponential { a, b } if a > 0.0 && b > 0.0 => {
                a.ln() - b.ln() + b * (x - s.t_start)
            }
            _ => h.ln(),
        }
    }

    pub fn density(&self, x: f64) -> f64 {
        if self.in_tail(x) {
            return self.periodic().unwrap().density(x);
        }
        let s = &self.segments[self.segment_index(x)];
        s.kind.density(s.t_start, x)
    }

    /// True when no breakpoint lies strictly inside `(lo, hi)`. Every segment kind has
    /// a convex density, so then the density is convex on `[lo, hi]`.
    pub fn single_piece(&self, lo: f64, hi: f64) -> bool {
        self.breakpoints_in(lo, hi, 3).iter().all(|&p| p <= lo || p >= hi)
    }

    /// Lower bound for the density on `[lo, hi]`, conservative by a few ulps.
    pub fn density_inf(&self, lo: f64, hi: f64) -> f64 {
        let lo = lo.max(0.0);
        if !(hi >= lo) {
            return f64::INFINITY;
        }
        let mut m = f64::INFINITY;
        let head_end = self.periodic().map_or(f64::INFINITY, |p| p.start);
        if lo < head_end {
            let top = hi.min(head_end);
            let first = self.segment_index(lo);
            for i in first..self.segments.len() {
                let s = &self.segments[i];
                if s.t_start > top {
                    break;
                }
                let a = lo.max(s.t_start);
                let b = top.min(self.segment_end(i));
                // Every segment density is monotone, so the endpoints suffice.
                let d = s.kind.density(s.t_start, a).min(s.kind.density(s.t_start, b));
                m = m.min(if d.is_nan() { 0.0 } else { d });
            }
        }
        if let Some(p) = self.periodic() {
            if hi >= p.start {
                m = m.min(p.density_inf(lo.max(p.start), hi));
            }
        }
        m * (1.0 - 1e-12)
    }

    pub fn left_inverse(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t > self.sup_h || (t == self.sup_h && !self.unbounded && self.sup_is_asymptotic()) {
            return f64::INFINITY;
        }
        if let Some(p) = self.periodic() {
            if t > p.h_start {
                return p.left_inverse(t);
            }
        }
        let i = self.segments.partition_point(|s| s.h_base < t).saturating_sub(1);
        let s = &self.segments[i];
        let end = self.segment_end(i);
        (s.t_start + s.kind.inverse_mass(s.t_start, t - s.h_base)).min(end)
    }

    fn sup_is_asymptotic(&self) -> bool {
        // A decaying exponential tail approaches sup H without attaining it.
        matches!(
            self.segments.last().map(|s| s.kind),
            Some(SegmentKind::Exponential { a, b }) if a > 0.0 && b < 0.0
        )
    }

    pub fn right_inverse(&self, t: f64) -> f64 {
        let t = t.max(0.0);
        if t >= self.sup_h {
            return f64::INFINITY;
        }
        if let Some(p) = self.periodic() {
            if t >= p.h_start {
                return p.right_inverse(t);
            }
        }
        let i = self.segments.partition_point(|s| s.h_base <= t).saturating_sub(1);
        let s = &self.segments[i];
        let end = self.segment_end(i);
        if s.kind.is_zero() {
            return end;
        }
        (s.t_start + s.kind.inverse_mass(s.t_start, t - s.h_base)).min(end)
    }

    pub fn inverse(&self, t: f64, side: InverseSide) -> f64 {
        match side {
            InverseSide::Left => self.left_inverse(t),
            InverseSide::Right => self.right_inverse(t),
        }
    }

    /// `H(α · H⁻¹(t) + β)`, evaluated without forming `H⁻¹(t)` when it overflows
    /// (reciprocal tails reach `e^{1/λ}`-sized abscissae).
    pub fn h_at_affine_inverse(&self, t: f64, side: InverseSide, alpha: f64, beta: f64) -> f64 {
        let x = self.inverse(t, side);
        if x.is_finite() {
            return self.h(alpha * x + beta);
        }
        if t.is_finite() && t < self.sup_h && self.periodic().is_none() {
            let last = self.segments.last().expect("nonempty");
            if let SegmentKind::Reciprocal { a, c } = last.kind {
                let k = a * last.t_start + c;
                let d = a * (t - last.h_base);
                let inner = ((1.0 - alpha) * c + a * beta) * (-d).exp() / (alpha * k);
                let v = last.h_base + (alpha.ln() + d + inner.ln_1p()) / a;
                return v.max(last.h_base);
            }
        }
        self.sup_h
    }

    /// `μ(B(x, r)) = H(x + r) − H(max(x − r, 0))`.
    pub fn ball_mass(&self, x: f64, r: f64) -> f64 {
        (self.h(x + r) - self.h(x - r)).max(0.0)
    }

    /// `μ([a, b])`.
    pub fn interval_mass(&self, a: f64, b: f64) -> f64 {
        if b <= a {
            return 0.0;
        }
        (self.h(b) - self.h(a)).max(0.0)
    }

    /// Elementary piece (segment, or profile piece of the periodic tail) containing `x`;
    /// with `left`, the piece whose interior approaches `x` from the left.
    fn piece_at(&self, x: f64, left: bool) -> Option<(f64, f64, bool)> {
        if left && x <= 0.0 {
            return None;
        }
        if let Some(p) = self.periodic() {
            if x > p.start || (x == p.start && !left) {
                return Some(p.piece_at(x, left));
            }
            if self.segments.is_empty() {
                return None;
            }
        }
        let i = if left {
            self.segments.partition_point(|s| s.t_start < x).saturating_sub(1)
        } else {
            self.segment_index(x)
        };
        let s = &self.segments[i];
        Some((s.t_start, self.segment_end(i), !s.kind.is_zero()))
    }

    fn max_walk(&self) -> usize {
        self.segments.len() + 2 * self.periodic().map_or(0, |p| p.piece_count()) + 4
    }

    /// Right end of the density-zero stretch starting at `x` (`x` itself when the
    /// density is positive just right of `x`).
    pub fn zero_run_end(&self, x: f64) -> f64 {
        let mut x = x.max(0.0);
        for _ in 0..self.max_walk() {
            match self.piece_at(x, false) {
                Some((_, hi, pos)) => {
                    if pos {
                        return x;
                    }
                    if !hi.is_finite() {
                        return f64::INFINITY;
                    }
                    x = hi;
                }
                None => return f64::INFINITY,
            }
        }
        x
    }

    /// Left end of the density-zero stretch ending at `x`; `None` when that stretch
    /// reaches 0 (no mass to the left).
    pub fn zero_run_start(&self, x: f64) -> Option<f64> {
        let mut x = x;
        for _ in 0..self.max_walk() {
            match self.piece_at(x, true) {
                Some((lo, _, pos)) => {
                    if pos {
                        return Some(x);
                    }
                    x = lo;
                }
                None => return None,
            }
        }
        Some(x)
    }

    /// `inf{r > 0 : μ(B(x, r)) > 0}`.
    pub fn r_zero(&self, x: f64) -> f64 {
        let right = self.zero_run_end(x) - x;
        if right == 0.0 {
            return 0.0;
        }
        let left = match self.zero_run_start(x) {
            Some(l) => x - l,
            None => f64::INFINITY,
        };
        right.min(left)
    }

    /// Abscissae in `[lo, hi]` where the closed form changes, at most `cap` of them.
    pub fn breakpoints_in(&self, lo: f64, hi: f64, cap: usize) -> Vec<f64> {
        let mut out = Vec::new();
        for s in self.segments.iter().skip(1) {
            if s.t_start >= lo && s.t_start <= hi && out.len() < cap {
                out.push(s.t_start);
            }
        }
        if let Some(p) = self.periodic() {
            p.breakpoints_in(lo, hi, cap, &mut out);
        }
        out
    }

    pub fn h_eval(&self, x: f64) -> Result<f64> {
        check_nonneg("x", x)?;
        Ok(self.h(x))
    }

    pub fn h_inverse(&self, t: f64, side: InverseSide) -> Result<f64> {
        check_nonneg("t", t)?;
        Ok(self.inverse(t, side))
    }

    pub fn ball_mass_checked(&self, x: f64, r: f64) -> Result<f64> {
        check_nonneg("x", x)?;
        check_nonneg("r", r)?;
        Ok(self.ball_mass(x, r))
    }
}
