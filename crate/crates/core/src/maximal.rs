//! Pointwise evaluation of the centered maximal operator
//! `M_μ ν(x) = sup_{r ≥ r₀(x)} ν(B(x, r)) / μ(B(x, r))` and of the modified
//! operator with denominator `μ(B(x, k r))`.
//!
//! For general `ν` the supremum is searched over candidate radii (where either
//! ball edge crosses an atom, a step endpoint or a breakpoint of `μ`); between
//! candidates the numerator is constant unless a ball edge sweeps through a step,
//! and only those gaps are refined, with a dyadic grid plus golden-section runs.

use serde::Serialize;

use crate::error::{check_nonneg, Error, Result};
use crate::measure::{DistributionMeasure, FiniteTestMeasure};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaximalValue {
    /// `+∞` when the optimal ball has `μ`-mass 0 and positive `ν`-mass.
    pub value: f64,
    pub attained_radius: Option<f64>,
    /// The value is exact (closed form), not a search lower bound.
    pub certified: bool,
}

const BREAKPOINT_CAP: usize = 4096;
const GOLDEN_STEPS: usize = 40;

/// `M_μ δ_y(x) = 1 / μ(B(x, max(|x − y|, r₀(x))))`.
pub fn maximal_delta(mu: &DistributionMeasure, y: f64, x: f64) -> Result<MaximalValue> {
    check_nonneg("x", x)?;
    check_nonneg("y", y)?;
    let r = (x - y).abs().max(mu.r_zero(x));
    let m = mu.ball_mass(x, r);
    let value = if m > 0.0 { 1.0 / m } else { f64::INFINITY };
    Ok(MaximalValue { value, attained_radius: Some(r), certified: true })
}

/// Lower bound for `M_μ ν(x)`, nondecreasing in `refine` and exact for single atoms.
pub fn maximal_nu(
    mu: &DistributionMeasure,
    nu: &FiniteTestMeasure,
    x: f64,
    refine: usize,
) -> Result<MaximalValue> {
    maximal_modified(mu, nu, 1.0, x, refine)
}

/// Lower bound for `sup_r ν(B(x, r)) / μ(B(x, k r))`, `k ≥ 1`.
pub fn maximal_modified(
    mu: &DistributionMeasure,
    nu: &FiniteTestMeasure,
    k: f64,
    x: f64,
    refine: usize,
) -> Result<MaximalValue> {
    check_nonneg("x", x)?;
    if !(k >= 1.0 && k.is_finite()) {
        return Err(Error::domain(format!("k must be ≥ 1, got {k}")));
    }
    if refine == 0 {
        return Err(Error::domain("refine must be at least 1"));
    }
    Ok(search(mu, nu, k, x, refine))
}

pub(crate) fn search(
    mu: &DistributionMeasure,
    nu: &FiniteTestMeasure,
    k: f64,
    x: f64,
    refine: usize,
) -> MaximalValue {
    let scale = nu.scale();
    let r0 = mu.r_zero(x);
    if let Some((p, _)) = nu.single_atom() {
        let w = nu.atoms()[0].1;
        let r = (x - p).abs().max(r0);
        let m = mu.ball_mass(x, k * r);
        let raw = if m > 0.0 { w / m } else { f64::INFINITY };
        return MaximalValue { value: scale * raw, attained_radius: Some(r), certified: true };
    }
    let ratio = Ratio { mu, nu, k, x };
    if !r0.is_finite() {
        return MaximalValue { value: f64::INFINITY, attained_radius: None, certified: false };
    }
    let r_full = (x - nu.support_min()).max(nu.support_radius() - x).max(0.0);
    let r_hi = r_full.max(r0);
    let cands = candidates(mu, nu, k, x, r0, r_hi);

    let mut best = Best::default();
    let vals: Vec<f64> = cands
        .iter()
        .map(|&r| {
            let v = ratio.eval(r);
            best.offer(r, v);
            v
        })
        .collect();

    let levels = usize::BITS - (refine - 1).leading_zeros();
    let n = 1usize << levels;
    for i in 0..cands.len().saturating_sub(1) {
        let (lo, hi) = (cands[i], cands[i + 1]);
        let mid = 0.5 * (lo + hi);
        if !(nu.step_active_at(x + mid) || nu.step_active_at(x - mid)) {
            continue;
        }
        let h = (hi - lo) / n as f64;
        let mut grid = Vec::with_capacity(n + 1);
        grid.push(vals[i]);
        for j in 1..n {
            let r = lo + j as f64 * h;
            let v = ratio.eval(r);
            best.offer(r, v);
            grid.push(v);
        }
        grid.push(vals[i + 1]);
        for level in 0..=levels {
            let stride = 1usize << (levels - level);
            let mut jb = 0;
            for j in (0..=n).step_by(stride) {
                if grid[j] > grid[jb] {
                    jb = j;
                }
            }
            let a = if jb >= stride { lo + (jb - stride) as f64 * h } else { lo };
            let b = if jb + stride <= n { lo + (jb + stride) as f64 * h } else { hi };
            golden(&ratio, a, b.min(hi), &mut best);
        }
    }
    MaximalValue {
        value: scale * best.value,
        attained_radius: best.radius,
        certified: false,
    }
}

struct Ratio<'a> {
    mu: &'a DistributionMeasure,
    nu: &'a FiniteTestMeasure,
    k: f64,
    x: f64,
}

impl Ratio<'_> {
    /// Unscaled `ν(B(x,r)) / μ(B(x,kr))`; 0 when the numerator vanishes.
    fn eval(&self, r: f64) -> f64 {
        // Radii aimed at an atom, such as `|x − p|`, must not lose it to rounding.
        let r = r + 4.0 * f64::EPSILON * (self.x.abs() + r);
        let num = self.nu.raw_interval(self.x - r, self.x + r);
        if num == 0.0 {
            return 0.0;
        }
        let den = self.mu.ball_mass(self.x, self.k * r);
        if den > 0.0 {
            num / den
        } else {
            f64::INFINITY
        }
    }
}

#[derive(Default)]
struct Best {
    value: f64,
    radius: Option<f64>,
}

impl Best {
    fn offer(&mut self, r: f64, v: f64) {
        if v > self.value || (self.radius.is_none() && v > 0.0) {
            self.value = v;
            self.radius = Some(r);
        }
    }
}

fn golden(f: &Ratio<'_>, mut a: f64, mut b: f64, best: &mut Best) {
    if !(b > a) {
        return;
    }
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = b - g * (b - a);
    let mut x2 = a + g * (b - a);
    let mut f1 = f.eval(x1);
    let mut f2 = f.eval(x2);
    best.offer(x1, f1);
    best.offer(x2, f2);
    for _ in 0..GOLDEN_STEPS {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + g * (b - a);
            f2 = f.eval(x2);
            best.offer(x2, f2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - g * (b - a);
            f1 = f.eval(x1);
            best.offer(x1, f1);
        }
    }
}

fn candidates(
    mu: &DistributionMeasure,
    nu: &FiniteTestMeasure,
    k: f64,
    x: f64,
    r0: f64,
    r_hi: f64,
) -> Vec<f64> {
    let mut c = vec![r0, r_hi, x, x / k];
    c.extend(nu.key_points().map(|p| (x - p).abs()));
    // μ breakpoints only matter where the numerator is still growing.
    let mut budget = BREAKPOINT_CAP;
    for &(a, b, h) in nu.steps() {
        if h <= 0.0 {
            continue;
        }
        for (lo, hi) in [(a - x, b - x), (x - b, x - a)] {
            let lo = lo.max(r0);
            let hi = hi.min(r_hi);
            if hi <= lo || budget == 0 {
                continue;
            }
            for t in mu.breakpoints_in(x + k * lo, x + k * hi, budget) {
                c.push((t - x) / k);
            }
            for t in mu.breakpoints_in(x - k * hi, x - k * lo, budget) {
                c.push((x - t) / k);
            }
            budget = BREAKPOINT_CAP.saturating_sub(c.len());
        }
    }
    c.retain(|&r| r >= r0 && r <= r_hi && r.is_finite());
    c.sort_by(f64::total_cmp);
    c.dedup();
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::preset;
    use approx::assert_relative_eq;

    fn leb() -> DistributionMeasure {
        preset("lebesgue", None).unwrap()
    }

    #[test]
    fn delta_examples() {
        let mu = leb();
        assert_eq!(maximal_delta(&mu, 0.0, 4.0).unwrap().value, 0.125);
        assert_relative_eq!(maximal_delta(&mu, 2.0, 5.0).unwrap().value, 1.0 / 6.0);
        assert!(maximal_delta(&mu, 3.0, 3.0).unwrap().value.is_infinite());
    }

    #[test]
    fn nu_examples() {
        let mu = leb();
        let d2 = FiniteTestMeasure::atom(2.0, 1.0).unwrap();
        let v = maximal_nu(&mu, &d2, 5.0, 4).unwrap();
        assert_eq!(v.value, maximal_delta(&mu, 2.0, 5.0).unwrap().value);
        assert!(v.certified);
        let step = FiniteTestMeasure::step(0.0, 1.0, 1.0).unwrap();
        assert_relative_eq!(maximal_nu(&mu, &step, 4.0, 8).unwrap().value, 0.125, max_relative = 1e-12);
        assert_relative_eq!(maximal_nu(&mu, &step, 0.5, 8).unwrap().value, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn modified_examples() {
        let mu = leb();
        let d0 = FiniteTestMeasure::atom(0.0, 1.0).unwrap();
        assert_relative_eq!(maximal_modified(&mu, &d0, 2.0, 4.0, 4).unwrap().value, 1.0 / 12.0);
        assert_relative_eq!(maximal_modified(&mu, &d0, 2.0, 10.0, 4).unwrap().value, 1.0 / 30.0);
        assert!(maximal_modified(&mu, &d0, 0.5, 10.0, 4).is_err());
        let mix = FiniteTestMeasure::new(vec![(0.0, 0.3)], vec![(1.0, 4.0, 0.2)]).unwrap();
        for x in [0.3, 2.0, 7.5] {
            assert_eq!(
                maximal_modified(&mu, &mix, 1.0, x, 16).unwrap(),
                maximal_nu(&mu, &mix, x, 16).unwrap()
            );
        }
    }

    #[test]
    fn search_finds_interior_optimum() {
        // ν = step(0,1,1) at x = 0.25 on a weight that makes the optimum interior.
        let mu = preset("expweight", None).unwrap();
        let nu = FiniteTestMeasure::step(0.0, 1.0, 1.0).unwrap();
        let x = 0.25;
        let brute = (1..200_000)
            .map(|i| {
                let r = i as f64 * 1e-5;
                nu.ball_mass(x, r) / mu.ball_mass(x, r)
            })
            .fold(0.0, f64::max);
        let v = maximal_nu(&mu, &nu, x, 8).unwrap().value;
        assert!(v >= brute * (1.0 - 1e-9), "{v} vs {brute}");
    }
}
