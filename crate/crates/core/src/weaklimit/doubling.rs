use serde::Serialize;

use crate::measure::DistributionMeasure;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoublingReport {
    /// Largest `μ(B(x, 2r)) / μ(B(x, r))` over the grid, 0/0 cells skipped.
    pub c_est: f64,
    /// Pairs `r ≤ R` with `μ(B(x,R))/μ(B(x,r)) > C (R/r)^{log₂ C}`, `C = c_est`.
    pub violations: usize,
}

pub fn doubling_diagnostic(mu: &DistributionMeasure, xs: &[f64], rs: &[f64]) -> DoublingReport {
    let ratio = |x: f64, big: f64, small: f64| -> Option<f64> {
        let num = mu.ball_mass(x, big);
        let den = mu.ball_mass(x, small);
        match (num > 0.0, den > 0.0) {
            (false, false) => None,
            (_, true) => Some(num / den),
            (true, false) => Some(f64::INFINITY),
        }
    };
    let mut c_est: f64 = 0.0;
    for &x in xs {
        for &r in rs {
            if let Some(v) = ratio(x, 2.0 * r, r) {
                c_est = c_est.max(v);
            }
        }
    }
    let exponent = c_est.log2();
    let mut violations = 0;
    for &x in xs {
        for &r in rs {
            for &big in rs.iter().filter(|&&b| b >= r) {
                if let Some(v) = ratio(x, big, r) {
                    let bound = c_est * (big / r).powf(exponent);
                    if v > bound * (1.0 + 1e-12) {
                        violations += 1;
                    }
                }
            }
        }
    }
    DoublingReport { c_est, violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::GridSpec;
    use crate::measure::preset;

    #[test]
    fn lebesgue_is_two() {
        let mu = preset("lebesgue", None).unwrap();
        let xs = GridSpec::geometric(1.0, 2.0, 10).unwrap().values();
        let rs = GridSpec::geometric(0.125, 2.0, 12).unwrap().values();
        let d = doubling_diagnostic(&mu, &xs, &rs);
        assert_eq!(d.c_est, 2.0);
        assert_eq!(d.violations, 0);
    }

    #[test]
    fn expweight_grows() {
        let mu = preset("expweight", None).unwrap();
        let rs = GridSpec::geometric(0.25, 2.0, 5).unwrap().values();
        let small = doubling_diagnostic(&mu, &[1.0, 2.0, 4.0], &rs).c_est;
        let rs = GridSpec::geometric(0.25, 2.0, 7).unwrap().values();
        let big = doubling_diagnostic(&mu, &[1.0, 2.0, 4.0, 8.0, 16.0, 30.0], &rs);
        assert!(big.c_est > 1e3 * small);
        assert_eq!(big.violations, 0);
    }
}
