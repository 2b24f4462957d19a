//! Brute-force grid scans. These are consistent estimators for cross-checks,
//! not bounds.

use rayon::prelude::*;
use serde::Serialize;

use crate::maximal::search;
use crate::measure::{DistributionMeasure, FiniteTestMeasure, InverseSide};

fn scan(
    mu: &DistributionMeasure,
    nu: &FiniteTestMeasure,
    k: f64,
    lambda: f64,
    x_max: f64,
    nx: usize,
    nr: usize,
) -> f64 {
    let nx = nx.max(2);
    let dx = x_max / nx as f64;
    let cells: Vec<f64> = (0..nx)
        .into_par_iter()
        .map(|i| {
            let a = i as f64 * dx;
            let b = if i + 1 == nx { x_max } else { (i + 1) as f64 * dx };
            if search(mu, nu, k, 0.5 * (a + b), nr.max(1)).value > lambda {
                mu.interval_mass(a, b)
            } else {
                0.0
            }
        })
        .collect();
    cells.iter().sum()
}

/// Midpoint-rule estimate of `μ{x ∈ [0, x_max] : M_μ ν(x) > λ}` on `nx` cells,
/// with the maximal function searched at `refine = nr`.
pub fn oracle_level_set(
    mu: &DistributionMeasure,
    nu: &FiniteTestMeasure,
    lambda: f64,
    x_max: f64,
    nx: usize,
    nr: usize,
) -> f64 {
    scan(mu, nu, 1.0, lambda, x_max, nx, nr)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleScan {
    /// Mass found by the grid scan on `[0, x_scan]`.
    pub scanned: f64,
    /// `μ((x_scan, x_out])`, counted as if inside; zero when the scan reaches `x_out`.
    pub tail: f64,
    pub x_scan: f64,
    /// Beyond this point the modified maximal function is provably `≤ λ`.
    pub x_out: f64,
}

impl OracleScan {
    pub fn total(&self) -> f64 {
        self.scanned + self.tail
    }
}

/// Grid scan of `μ{M_{k,μ} ν > λ}` for the operator with denominator
/// `μ(B(x, k r))`, `k ≥ 1`.
///
/// Past `x_out` no ball meeting `supp ν` is light enough. When `x_out` exceeds
/// `cap` (slowly growing weights put it near `e^{1/λ}`), the scan stops at `cap`
/// and the remaining mass up to `x_out` is added in full.
pub fn oracle_modified_level_set(
    mu: &DistributionMeasure,
    nu: &FiniteTestMeasure,
    k: f64,
    lambda: f64,
    nx: usize,
    nr: usize,
    cap: f64,
) -> OracleScan {
    let big_r = nu.support_radius();
    let t = nu.total_mass() / lambda;
    let (x_out, h_out) = if k == 1.0 {
        let s = mu.h(big_r) + t;
        (
            0.5 * (mu.left_inverse(s) + big_r),
            mu.h_at_affine_inverse(s, InverseSide::Left, 0.5, 0.5 * big_r),
        )
    } else {
        let floor = k * big_r / (k - 1.0);
        let x = (mu.left_inverse(t) + k * big_r) / (1.0 + k);
        if x.is_finite() {
            let x = x.max(floor);
            (x, mu.h(x))
        } else {
            (x, mu.h_at_affine_inverse(t, InverseSide::Left, 1.0 / (1.0 + k), k * big_r / (1.0 + k)))
        }
    };
    let x_scan = x_out.min(cap);
    let scanned = scan(mu, nu, k, lambda, x_scan, nx, nr);
    let tail = if x_out > cap { (h_out - mu.h(cap)).max(0.0) } else { 0.0 };
    OracleScan { scanned, tail, x_scan, x_out }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::preset;

    #[test]
    fn dirac_examples() {
        let d0 = FiniteTestMeasure::atom(0.0, 1.0).unwrap();
        let leb = preset("lebesgue", None).unwrap();
        let m = oracle_level_set(&leb, &d0, 0.01, 100.0, 100_000, 4);
        assert!((m - 50.0).abs() <= 0.1, "{m}");
        let exp = preset("expweight", None).unwrap();
        let m = oracle_level_set(&exp, &d0, 0.01, 5.0, 20_000, 4);
        assert!((m - 9.05).abs() <= 0.05, "{m}");
    }

    #[test]
    fn modified_lebesgue_third() {
        let d0 = FiniteTestMeasure::atom(0.0, 1.0).unwrap();
        let leb = preset("lebesgue", None).unwrap();
        let s = oracle_modified_level_set(&leb, &d0, 2.0, 0.01, 10_000, 4, 1e7);
        assert!((0.01 * s.total() - 1.0 / 3.0).abs() < 1e-3, "{s:?}");
    }
}
