use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::bisect::{bisect, Class};
use super::delta::level_set_delta;
use super::{CertifiedInterval, SweepResult, SweepRow};
use crate::error::{check_positive, Error, Result};
use crate::grid::GridSpec;
use crate::maximal::search;
use crate::measure::{DistributionMeasure, FiniteTestMeasure, InverseSide};

const UPPER_SPLITS: usize = 4096;
const UPPER_PIECES: usize = 64;
const MAX_ITER: usize = 200_000;
const LOWER_RADII: usize = 48;

/// Interval for `μ{x ≥ 0 : M_μ ν(x) > λ}` with `λ (hi − lo) ≤ tol` when certified.
///
/// With `R` the support radius of `ν` and `t = ν(X)/λ`:
/// * on `[R, H⁻¹(t)/2)` the ball `B(x, x) ⊇ [0, R]` gives `Mν(x) ≥ ν(X)/H(2x) > λ`;
/// * beyond `(H⁻¹(H(R) + t) + R)/2` every ball meeting `supp ν` has
///   `μ`-mass at least `H(2x − R) − H(R) ≥ t`, so `Mν(x) ≤ λ`.
///
/// `[0, R]` and the gap between the two thresholds are resolved by adaptive
/// bisection with per-cell lower and upper bounds for `Mν`.
pub fn level_set_nu_certified(
    mu: &DistributionMeasure,
    nu: &FiniteTestMeasure,
    lambda: f64,
    tol: f64,
) -> Result<CertifiedInterval> {
    check_positive("lambda", lambda)?;
    check_positive("tol", tol)?;
    mu.require_unbounded()?;
    if let Some((p, w)) = nu.single_atom() {
        return Ok(CertifiedInterval::exact(level_set_delta(mu, p, lambda / w)?));
    }
    let total = nu.total_mass();
    let big_r = nu.support_radius();
    let t = total / lambda;
    let h_r = mu.h(big_r);

    let x_in = 0.5 * mu.left_inverse(t);
    let m_in = mu.h_at_affine_inverse(t, InverseSide::Left, 0.5, 0.0);
    let t_out = h_r + t;
    let x_out = 0.5 * (mu.left_inverse(t_out) + big_r);
    let m_out = mu.h_at_affine_inverse(t_out, InverseSide::Left, 0.5, 0.5 * big_r);

    let inside_tail = if x_in > big_r { (m_in - h_r).max(0.0) } else { 0.0 };
    let gap_lo = x_in.max(big_r);
    let stop = tol / lambda;

    let mut cells = vec![(0.0, big_r)];
    let mut frozen_gap = 0.0;
    if x_out.is_finite() && gap_lo.is_finite() {
        if x_out > gap_lo {
            cells.push((gap_lo, x_out));
        }
    } else {
        // Positions overflow; the gap can only be carried as unresolved mass.
        frozen_gap = (m_out - m_in.max(h_r)).max(0.0);
    }

    let ctx = Bounds { mu, nu, lambda, total, lo_support: nu.support_min(), hi_support: big_r };
    let out = bisect(
        &cells,
        |a, b| mu.interval_mass(a, b),
        |a, b| ctx.classify(a, b),
        (stop - frozen_gap).max(0.0),
        MAX_ITER,
    );
    let lo = out.inside + inside_tail;
    let hi = lo + out.unresolved + frozen_gap;
    if !(lo.is_finite() && hi.is_finite()) {
        return Err(Error::Numerical(format!("level-set mass overflowed at λ = {lambda}")));
    }
    Ok(CertifiedInterval { lo, hi, certified: out.complete && hi - lo <= stop })
}

/// A few ulps at magnitude `m`, to keep interval endpoints on the safe side of rounding.
fn slack(m: f64) -> f64 {
    8.0 * f64::EPSILON * m + f64::MIN_POSITIVE
}

struct Bounds<'a> {
    mu: &'a DistributionMeasure,
    nu: &'a FiniteTestMeasure,
    lambda: f64,
    total: f64,
    lo_support: f64,
    hi_support: f64,
}

impl Bounds<'_> {
    fn classify(&self, x1: f64, x2: f64) -> Class {
        if self.lower(x1, x2) > self.lambda {
            Class::Inside
        } else if self.upper(x1, x2) <= self.lambda {
            Class::Outside
        } else {
            Class::Unknown
        }
    }

    /// `ν` of the intersection over `μ` of the union of `B(x, r)`, `x ∈ [x1, x2]`.
    fn lower_at(&self, x1: f64, x2: f64, r: f64) -> f64 {
        // Slightly larger radius so that rounding cannot drop an atom on the ball edge.
        let r = r + slack(x2.abs() + r);
        let num = self.nu.interval_mass(x2 - r, x1 + r);
        if num <= 0.0 {
            return 0.0;
        }
        let den = self.mu.interval_mass((x1 - r).max(0.0), x2 + r);
        if den > 0.0 {
            num / den
        } else {
            f64::INFINITY
        }
    }

    fn lower(&self, x1: f64, x2: f64) -> f64 {
        let cover = (x2 - self.lo_support).max(self.hi_support - x1).max(0.0);
        let mut best = self.lower_at(x1, x2, cover);
        for &(p, _) in self.nu.atoms() {
            best = best.max(self.lower_at(x1, x2, (x1 - p).abs().max((x2 - p).abs())));
        }
        let mid = 0.5 * (x1 + x2);
        if let Some(r) = search(self.mu, self.nu, 1.0, mid, 2).attained_radius {
            best = best.max(self.lower_at(x1, x2, r + 0.5 * (x2 - x1)));
        }
        // The radius may follow x: balls with a fixed left or right end.
        for p in self.nu.key_points() {
            if p <= x1 {
                let e = slack(x2.abs() + x2 - p);
                let num = self.nu.interval_mass(p, 2.0 * x1 - p - e);
                if num > 0.0 {
                    best = best.max(num / self.mu.interval_mass(p, 2.0 * x2 - p + e));
                }
            }
            if p >= x2 {
                let e = slack(p);
                let num = self.nu.interval_mass(2.0 * x2 - p + e, p);
                if num > 0.0 {
                    best = best.max(num / self.mu.interval_mass((2.0 * x1 - p - e).max(0.0), p));
                }
            }
        }
        // Suprema approached as r → 0 inside a step.
        let w = x2 - x1;
        if w > 0.0 && self.nu.step_active_at(mid) {
            let mut r = w;
            for _ in 0..LOWER_RADII {
                best = best.max(self.lower_at(x1, x2, r));
                r *= 2.0;
                if r > cover {
                    break;
                }
            }
        }
        best
    }

    /// Bound on `ν(B(x,r))/μ(B(x,r))` for `x ∈ [x1, x2]`, `r ∈ [a, b]`.
    ///
    /// The left end `ℓ = x − r` ranges over `[x1 − b, x2 − a]`; that range is cut at
    /// the atoms and step ends of `ν` so the denominator only loses one sub-range.
    fn piece(&self, x1: f64, x2: f64, a: f64, b: f64) -> f64 {
        let (l_lo, l_hi) = (x1 - b, x2 - a);
        let mut cuts = vec![l_lo];
        cuts.extend(self.nu.key_points().filter(|&p| p > l_lo && p < l_hi));
        cuts.push(l_hi);
        cuts.sort_by(f64::total_cmp);
        let mut by_density = None;
        let mut best: f64 = 0.0;
        let mut bound = |la: f64, lb: f64, skip_atom: bool| {
            let rho_max = (x2 + b).min(2.0 * x2 - la);
            let rho_min = (x1 + a).max(2.0 * x1 - lb);
            let num = if rho_max.is_finite() && la.is_finite() {
                let e = slack(x2.abs() + rho_max.abs() + la.abs());
                let at = if skip_atom { self.atom_at(la) } else { 0.0 };
                let lo = if skip_atom { la } else { la - e };
                (self.nu.interval_mass(lo, rho_max + e) - at).max(0.0)
            } else {
                self.total
            };
            if num <= 0.0 {
                return 0.0;
            }
            let e = slack(x2.abs() + rho_min.abs() + lb.abs());
            let (lo, hi) = ((lb + slack(x2.abs() + a)).max(0.0), rho_min - e);
            let den = if hi > lo { self.mu.interval_mass(lo, hi) } else { 0.0 };
            let by_mass = if den > 0.0 { num / den } else { f64::INFINITY };
            by_mass.min(*by_density.get_or_insert_with(|| self.density_ratio(x1, x2, b)))
        };
        for (i, w) in cuts.windows(2).enumerate() {
            let (la, lb) = (w[0], w[1]);
            // `ℓ` strictly above an atom at `la` misses it.
            if i > 0 && self.atom_at(la) > 0.0 {
                best = best.max(bound(la, la, false)).max(bound(la, lb, true));
            } else {
                best = best.max(bound(la, lb, false));
            }
            if best == f64::INFINITY {
                break;
            }
        }
        best
    }

    fn atom_at(&self, p: f64) -> f64 {
        let raw: f64 = self.nu.atoms().iter().filter(|a| a.0 == p).map(|a| a.1).sum();
        raw * self.nu.scale()
    }

    /// Every ball `B(x, r) ∩ [0, ∞)` with `x ∈ [x1, x2]`, `r ≤ b` lies in one interval
    /// where `ν ≤ sup dν/dx` and `μ ≥ inf dμ/dx` pointwise, which bounds the ratio
    /// regardless of how small the ball is.
    fn density_ratio(&self, x1: f64, x2: f64, b: f64) -> f64 {
        if !b.is_finite() {
            return f64::INFINITY;
        }
        let e = slack(x2.abs() + b);
        let (lo, hi) = ((x1 - b - e).max(0.0), x2 + b + e);
        let top = self.nu.density_sup(lo, hi);
        if top == 0.0 {
            return 0.0;
        }
        // A convex density averages at least its centre value over a symmetric ball.
        let bottom = if x1 - b - e >= 0.0 && self.mu.single_piece(lo, hi) {
            self.mu.density_inf(x1, x2)
        } else {
            self.mu.density_inf(lo, hi)
        };
        if bottom > 0.0 {
            top / bottom
        } else {
            f64::INFINITY
        }
    }

    /// Returns a value `≤ λ` only when every radius is ruled out; pieces above `λ`
    /// are halved until they are no wider than the cell.
    fn upper(&self, x1: f64, x2: f64) -> f64 {
        if x1 >= self.hi_support {
            return self.upper_far(x1, x2);
        }
        let r_lo = (x1 - self.hi_support).max(self.lo_support - x2).max(0.0);
        let r_hi = (x2 - self.lo_support).max(self.hi_support - x1).max(r_lo);
        let mut best = self.piece(x1, x2, r_hi, f64::INFINITY);
        if best > self.lambda {
            return best;
        }
        let h = (r_hi - r_lo) / UPPER_PIECES as f64;
        let min_width = (x2 - x1).max(1e-12 * r_hi);
        // Worst piece first: a cell that truly straddles the boundary fails fast.
        let mut heap = BinaryHeap::new();
        let mut consider = |a: f64, b: f64, heap: &mut BinaryHeap<Piece>| {
            let v = self.piece(x1, x2, a, b);
            if v <= self.lambda {
                best = best.max(v);
            } else {
                heap.push(Piece { v, a, b });
            }
        };
        for j in 0..UPPER_PIECES {
            let a = r_lo + j as f64 * h;
            consider(a, if j + 1 == UPPER_PIECES { r_hi } else { a + h }, &mut heap);
        }
        let mut budget = UPPER_SPLITS;
        while let Some(Piece { v, a, b }) = heap.pop() {
            if b - a <= min_width || budget == 0 {
                return v;
            }
            budget -= 1;
            // Geometric splits resolve small radii in relative terms.
            let m = if a > 0.0 { (a * b).sqrt() } else { 0.5 * (a + b) };
            consider(a, m, &mut heap);
            consider(m, b, &mut heap);
        }
        best
    }
}

struct Piece {
    v: f64,
    a: f64,
    b: f64,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.v.total_cmp(&o.v).then(o.a.total_cmp(&self.a))
    }
}

impl Bounds<'_> {
    /// Upper bound for cells right of `supp ν`, indexed by the left end `ℓ` of the
    /// ball rather than its radius, so that `ℓ` stays exact when `x` is huge.
    /// Every ball meeting the support has `ℓ ≤ R`, and its right end `2x − ℓ ≥ x ≥ R`.
    fn upper_far(&self, x1: f64, x2: f64) -> f64 {
        let piece = |la: f64, lb: f64, open: bool| -> f64 {
            let num = if la.is_finite() {
                let at = if open { self.atom_at(la) } else { 0.0 };
                let lo = if open { la } else { la - slack(la.abs()) };
                (self.nu.interval_mass(lo, f64::INFINITY) - at).max(0.0)
            } else {
                self.total
            };
            if num <= 0.0 {
                return 0.0;
            }
            let rho = 2.0 * x1 - lb;
            let (lo, hi) = ((lb + slack(lb.abs())).max(0.0), rho - slack(rho.abs() + lb.abs()));
            let den = if hi > lo { self.mu.interval_mass(lo, hi) } else { 0.0 };
            let by_mass = if den > 0.0 { num / den } else { f64::INFINITY };
            if by_mass <= self.lambda || !la.is_finite() {
                return by_mass;
            }
            by_mass.min(self.density_ratio(x1, x2, x2 - la))
        };
        let mut best = piece(f64::NEG_INFINITY, 0.0, false);
        if best > self.lambda {
            return best;
        }
        let mut cuts = vec![0.0, self.hi_support];
        cuts.extend(self.nu.key_points().filter(|&p| p > 0.0 && p < self.hi_support));
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let mut stack = Vec::new();
        for w in cuts.windows(2).rev() {
            stack.push((w[0], w[1], self.atom_at(w[0]) > 0.0));
        }
        if self.atom_at(self.hi_support) > 0.0 {
            let v = piece(self.hi_support, self.hi_support, false);
            if v > self.lambda {
                return v;
            }
            best = best.max(v);
        }
        let mut budget = UPPER_SPLITS;
        while let Some((la, lb, open)) = stack.pop() {
            let mut v = piece(la, lb, open);
            if open {
                v = v.max(piece(la, la, false));
            }
            if v <= self.lambda {
                best = best.max(v);
                continue;
            }
            if lb - la <= 1e-12 * lb.abs().max(1.0) || budget == 0 {
                return v;
            }
            budget -= 1;
            let m = 0.5 * (la + lb);
            stack.push((m, lb, false));
            stack.push((la, m, open));
        }
        best
    }
}

/// Certified sweep over a decreasing λ grid; rows are computed independently.
pub fn sweep_nu(
    mu: &DistributionMeasure,
    nu: &FiniteTestMeasure,
    grid: &GridSpec,
    tol: f64,
) -> Result<SweepResult> {
    if !grid.is_decreasing() {
        return Err(Error::domain("λ grid must be decreasing"));
    }
    let rows = grid
        .values()
        .par_iter()
        .map(|&l| level_set_nu_certified(mu, nu, l, tol).map(|m| SweepRow::new(l, m)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { rows, grid: Some(*grid) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::preset;

    #[test]
    fn single_atom_collapses() {
        let mu = preset("lebesgue", None).unwrap();
        let nu = FiniteTestMeasure::atom(0.0, 1.0).unwrap();
        let iv = level_set_nu_certified(&mu, &nu, 0.01, 1e-6).unwrap();
        assert_eq!((iv.lo, iv.hi, iv.certified), (50.0, 50.0, true));
    }

    #[test]
    fn unit_step_tail() {
        let mu = preset("lebesgue", None).unwrap();
        let nu = FiniteTestMeasure::step(0.0, 1.0, 1.0).unwrap();
        let lam = 0.001;
        let iv = level_set_nu_certified(&mu, &nu, lam, 1e-4).unwrap();
        assert!(iv.certified);
        assert!(lam * iv.lo >= 0.5 - 2e-3 && lam * iv.hi <= 0.5 + 2e-3, "{iv:?}");
    }

    #[test]
    fn mixture_near_half() {
        let mu = preset("lebesgue", None).unwrap();
        let nu = FiniteTestMeasure::new(vec![(0.0, 0.3), (5.0, 0.2)], vec![(1.0, 4.0, 1.0 / 6.0)]).unwrap();
        let lam = 1e-3;
        let iv = level_set_nu_certified(&mu, &nu, lam, 1e-4).unwrap();
        assert!(iv.certified, "{iv:?}");
        assert!((lam * iv.mid() - 0.5).abs() < 2e-2, "{iv:?}");
    }
}
