use rayon::prelude::*;

use super::bisect::{bisect, Class};
use super::{CertifiedInterval, SweepResult, SweepRow};
use crate::error::{check_nonneg, check_positive, Error, Result};
use crate::grid::GridSpec;
use crate::measure::{DistributionMeasure, InverseSide};

/// Right part of `{x > y : H(2x − y) − H(y) < 1/λ}`, as a `μ`-mass.
fn right_branch(mu: &DistributionMeasure, y: f64, lambda: f64) -> f64 {
    let hy = mu.h(y);
    let t = hy + 1.0 / lambda;
    (mu.h_at_affine_inverse(t, InverseSide::Left, 0.5, 0.5 * y) - hy).max(0.0)
}

/// Exact `μ{x ≥ 0 : M_μ δ_y(x) > λ}`.
pub fn level_set_delta(mu: &DistributionMeasure, y: f64, lambda: f64) -> Result<f64> {
    check_nonneg("y", y)?;
    check_positive("lambda", lambda)?;
    mu.require_unbounded()?;
    let t = 1.0 / lambda;
    let hy = mu.h(y);
    let right = right_branch(mu, y, lambda);
    let left = if hy < t {
        hy
    } else {
        let x_l = 0.5 * (y + mu.right_inverse(hy - t));
        (hy - mu.h(x_l)).max(0.0)
    };
    let m = right + left;
    if !m.is_finite() {
        return Err(Error::Numerical(format!(
            "level-set mass overflowed at y = {y}, λ = {lambda}"
        )));
    }
    Ok(m)
}

/// `λ ↦ λ μ{M_μ δ_y > λ}` over a decreasing geometric grid; rows are exact.
pub fn sweep_delta(mu: &DistributionMeasure, y: f64, grid: &GridSpec) -> Result<SweepResult> {
    if !grid.is_decreasing() {
        return Err(Error::domain("λ grid must be decreasing"));
    }
    let rows = grid
        .values()
        .par_iter()
        .map(|&l| level_set_delta(mu, y, l).map(|m| SweepRow::new(l, CertifiedInterval::exact(m))))
        .collect::<Result<Vec<_>>>()?;
    Ok(SweepResult { rows, grid: Some(*grid) })
}

/// `λ μ{x > r : 1/μ(B(x, x − r)) > λ}`.
pub fn thm22_minus(mu: &DistributionMeasure, r: f64, lambda: f64) -> Result<f64> {
    check_nonneg("r", r)?;
    check_positive("lambda", lambda)?;
    mu.require_unbounded()?;
    Ok(lambda * right_branch(mu, r, lambda))
}

/// `λ μ{x : 1/μ(B(x, x + r)) > λ}`.
pub fn thm22_plus(mu: &DistributionMeasure, r: f64, lambda: f64) -> Result<f64> {
    check_nonneg("r", r)?;
    check_positive("lambda", lambda)?;
    mu.require_unbounded()?;
    let t = 1.0 / lambda;
    if mu.left_inverse(t) <= r {
        return Ok(0.0);
    }
    Ok(lambda * mu.h_at_affine_inverse(t, InverseSide::Left, 0.5, -0.5 * r))
}

/// `Δ_μ(k, λ) = λ μ{x ∈ [0, x_cap] : μ(B(x, k x)) < 1/λ}`.
///
/// For `k ≥ 1` the set is `[0, H⁻¹(1/λ)/(1+k))` and the value is exact. For
/// `k < 1` the map `x ↦ H((1+k)x) − H((1−k)x)` need not be monotone; the set is
/// bracketed by bisection with interval bounds, and `x_cap` must be finite.
pub fn delta_k(mu: &DistributionMeasure, k: f64, lambda: f64, x_cap: f64) -> Result<CertifiedInterval> {
    check_positive("k", k)?;
    check_positive("lambda", lambda)?;
    check_positive("x_cap", x_cap)?;
    let t = 1.0 / lambda;
    if k >= 1.0 {
        let x_star = mu.left_inverse(t) / (1.0 + k);
        let m = if x_star >= x_cap {
            mu.h(x_cap)
        } else {
            mu.h_at_affine_inverse(t, InverseSide::Left, 1.0 / (1.0 + k), 0.0)
        };
        return Ok(CertifiedInterval::exact(lambda * m));
    }
    if !x_cap.is_finite() {
        return Err(Error::domain("k < 1 needs a finite x_cap"));
    }
    let (up, down) = (1.0 + k, 1.0 - k);
    let classify = |a: f64, b: f64| {
        let gmax = mu.h(up * b) - mu.h(down * a);
        let gmin = mu.h(up * a) - mu.h(down * b);
        if gmax < t {
            Class::Inside
        } else if gmin >= t {
            Class::Outside
        } else {
            Class::Unknown
        }
    };
    let mut cuts: Vec<f64> = (0..=64).map(|i| x_cap * i as f64 / 64.0).collect();
    for f in [up, down] {
        cuts.extend(mu.breakpoints_in(0.0, f * x_cap, 4096).into_iter().map(|b| b / f));
    }
    cuts.retain(|&c| c >= 0.0 && c <= x_cap);
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let cells: Vec<(f64, f64)> = cuts.windows(2).map(|w| (w[0], w[1])).collect();
    let stop = 1e-12 / lambda;
    let out = bisect(&cells, |a, b| mu.interval_mass(a, b), classify, stop, 400_000);
    Ok(CertifiedInterval {
        lo: lambda * out.inside,
        hi: lambda * (out.inside + out.unresolved),
        certified: out.complete,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::preset;
    use approx::assert_relative_eq;

    fn p(name: &str) -> DistributionMeasure {
        preset(name, None).unwrap()
    }

    #[test]
    fn level_set_examples() {
        assert_eq!(level_set_delta(&p("lebesgue"), 0.0, 0.01).unwrap(), 50.0);
        let e = level_set_delta(&p("expweight"), 0.0, 0.01).unwrap();
        assert_relative_eq!(e, 9.049875621120890270, max_relative = 1e-13);
        let l = level_set_delta(&p("logweight"), 0.0, 0.1).unwrap();
        assert_relative_eq!(l, 9.306898218339271556, max_relative = 1e-13);
        assert!(level_set_delta(&p("lebesgue"), 0.0, 0.0).is_err());
    }

    #[test]
    fn left_branch_lebesgue() {
        // y = 5, λ = 0.5: {|x − 5| small}: right (5, 6), left (4, 5).
        assert_relative_eq!(level_set_delta(&p("lebesgue"), 5.0, 0.5).unwrap(), 2.0);
        // y = 5, λ = 0.01: left branch is all of [0, 5).
        assert_relative_eq!(level_set_delta(&p("lebesgue"), 5.0, 0.01).unwrap(), 55.0);
    }

    #[test]
    fn sweep_examples() {
        let g = GridSpec::geometric(1e-2, 0.1, 3).unwrap();
        for row in sweep_delta(&p("lebesgue"), 0.0, &g).unwrap().rows {
            assert_relative_eq!(row.lambda_mass.lo, 0.5, max_relative = 1e-12);
        }
        let g = GridSpec::geometric(1e-6, 0.5, 1).unwrap();
        let r = sweep_delta(&p("expweight"), 0.0, &g).unwrap();
        assert_relative_eq!(r.rows[0].lambda_mass.lo, 0.00099900049999987500, max_relative = 1e-9);
        let g = GridSpec::geometric(1e-4, 0.5, 1).unwrap();
        let r = sweep_delta(&p("logweight"), 0.0, &g).unwrap();
        assert_relative_eq!(r.rows[0].lambda_mass.lo, 0.99993068528194400547, max_relative = 1e-12);
        assert!(sweep_delta(&p("lebesgue"), 0.0, &GridSpec::geometric(1.0, 2.0, 3).unwrap()).is_err());
    }

    #[test]
    fn bounded_measure_is_rejected() {
        use crate::measure::{SegmentKind, Tail};
        let mu = DistributionMeasure::new(
            vec![(0.0, SegmentKind::Exponential { a: 1.0, b: -1.0 })],
            Tail::Extend,
        )
        .unwrap();
        assert_eq!(level_set_delta(&mu, 0.0, 0.1), Err(Error::Bounded));
    }

    #[test]
    fn level_bracket_examples() {
        let leb = p("lebesgue");
        assert_relative_eq!(thm22_plus(&leb, 1.0, 0.001).unwrap(), 0.4995, max_relative = 1e-12);
        assert_relative_eq!(thm22_minus(&leb, 1.0, 0.001).unwrap(), 0.5, max_relative = 1e-12);
        let e = p("expweight");
        let lam = 0.003;
        let base = lam * level_set_delta(&e, 0.0, lam).unwrap();
        assert_relative_eq!(thm22_plus(&e, 0.0, lam).unwrap(), base, max_relative = 1e-13);
        assert_relative_eq!(thm22_minus(&e, 0.0, lam).unwrap(), base, max_relative = 1e-13);
    }

    #[test]
    fn delta_k_examples() {
        let leb = p("lebesgue");
        for lam in [1e-2, 1e-3, 1e-4] {
            let d1 = delta_k(&leb, 1.0, lam, f64::INFINITY).unwrap();
            assert_relative_eq!(d1.lo, 0.5, max_relative = 1e-12);
            let d2 = delta_k(&leb, 2.0, lam, f64::INFINITY).unwrap();
            assert_relative_eq!(d2.lo, 1.0 / 3.0, max_relative = 1e-12);
            let dh = delta_k(&leb, 0.5, lam, 1e9).unwrap();
            assert!(dh.certified);
            assert!(dh.lo <= 1.0 && dh.hi >= 1.0 && dh.hi - dh.lo < 1e-9, "{dh:?}");
        }
    }
}
