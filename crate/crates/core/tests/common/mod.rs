//! Property checks shared by the proptest suite and the acceptance runner.
#![allow(dead_code)]

use hlweak_core::counterexample::{check_properties, BlockModel, CounterexampleParams};
use hlweak_core::measure::PRESET_NAMES;
use hlweak_core::weaklimit::{level_set_delta, level_set_nu_certified, oracle_level_set};
use hlweak_core::{maximal_nu, preset, DistributionMeasure, FiniteTestMeasure};
use hlweak_core::weaklimit::CertifiedInterval;
use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed, TestCaseError, TestRunner};

pub const SEED: u64 = 0x5eed_2024;

pub fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(SEED), failure_persistence: None, ..Config::default() }
}

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new(config(cases))
}

pub fn mu(name: &str) -> DistributionMeasure {
    preset(name, None).unwrap()
}

pub fn preset_name() -> impl Strategy<Value = &'static str> {
    prop::sample::select(PRESET_NAMES.to_vec())
}

pub fn nu_strategy() -> impl Strategy<Value = FiniteTestMeasure> {
    let atoms = prop::collection::vec((0.0..10.0f64, 0.05..2.0f64), 0..3);
    let steps = prop::collection::vec((0.0..8.0f64, 0.1..4.0f64, 0.05..1.0f64), 0..2);
    (atoms, steps)
        .prop_filter("ν must be nonzero", |(a, s)| !a.is_empty() || !s.is_empty())
        .prop_map(|(a, s)| {
            let steps = s.into_iter().map(|(lo, w, h)| (lo, lo + w, h)).collect();
            FiniteTestMeasure::new(a, steps).unwrap()
        })
}

fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)*) => {
        if !$cond {
            return Err(TestCaseError::fail(format!($($fmt)*)));
        }
    };
}

/// `M_μ(cν) = c · M_μ ν` pointwise and `μ{M(cν) > cλ} = μ{Mν > λ}`.
pub fn homogeneity(name: &str, nu: &FiniteTestMeasure, c: f64, x: f64, lambda: f64) -> Result<(), TestCaseError> {
    let m = mu(name);
    let scaled = nu.scaled(c).unwrap();
    let a = maximal_nu(&m, nu, x, 4).unwrap().value;
    let b = maximal_nu(&m, &scaled, x, 4).unwrap().value;
    ensure!(rel(b, c * a) <= 1e-13 || (a.is_infinite() && b.is_infinite()), "{name}: M(cν)={b} vs c·Mν={}", c * a);
    if m.is_unbounded() {
        let l1 = level_set_nu_certified(&m, nu, lambda, 1e-3).unwrap();
        let l2 = level_set_nu_certified(&m, &scaled, c * lambda, 1e-3).unwrap();
        // Both brackets hold the same true mass; their widths follow λ·(hi − lo) ≤ tol.
        let slack = 1e-12 * l1.hi.max(l2.hi);
        ensure!(l1.lo <= l2.hi + slack && l2.lo <= l1.hi + slack, "{name}: level sets {l1:?} vs {l2:?}");
        if l1.certified && l2.certified {
            ensure!(lambda * (l1.hi - l1.lo) <= 1e-3 && c * lambda * (l2.hi - l2.lo) <= 1e-3, "{name}: widths {l1:?} {l2:?}");
        }
    }
    Ok(())
}

/// `H(LEFT(t)) = t = H(RIGHT(t))` for continuous `H`, and `LEFT(H(x)) ≤ x ≤ RIGHT(H(x))`.
pub fn inversion(name: &str, x: f64) -> Result<(), TestCaseError> {
    let m = mu(name);
    let t = m.h(x);
    let (l, r) = (m.left_inverse(t), m.right_inverse(t));
    ensure!(l <= x * (1.0 + 1e-12) + 1e-12, "{name}: LEFT(H({x})) = {l}");
    ensure!(r >= x * (1.0 - 1e-12) - 1e-12, "{name}: RIGHT(H({x})) = {r}");
    ensure!(l <= r, "{name}: LEFT {l} > RIGHT {r}");
    if t > 0.0 {
        ensure!(rel(m.h(l), t) <= 1e-12, "{name}: H(LEFT({t})) = {}", m.h(l));
        if r.is_finite() {
            ensure!(rel(m.h(r), t) <= 1e-12, "{name}: H(RIGHT({t})) = {}", m.h(r));
        }
    }
    Ok(())
}

pub fn ball_monotone(name: &str, nu: &FiniteTestMeasure, x: f64, r1: f64, r2: f64) -> Result<(), TestCaseError> {
    let m = mu(name);
    let (a, b) = (r1.min(r2), r1.max(r2));
    ensure!(m.ball_mass(x, a) <= m.ball_mass(x, b), "{name}: μ-ball not monotone at x={x}");
    ensure!(nu.ball_mass(x, a) <= nu.ball_mass(x, b), "ν-ball not monotone at x={x}");
    ensure!(m.ball_mass(x, 0.0) == 0.0, "{name}: atom at {x}");
    Ok(())
}

const GL_NODES: [f64; 4] = [0.1834346424956498, 0.5255324099163290, 0.7966664774136267, 0.9602898564975363];
const GL_WEIGHTS: [f64; 4] = [0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763];

/// Gauss–Legendre (8 points) on 32 sub-panels between consecutive breakpoints.
pub fn quadrature(m: &DistributionMeasure, a: f64, b: f64) -> f64 {
    let mut cuts = vec![a];
    cuts.extend(m.breakpoints_in(a, b, 100_000).into_iter().filter(|&p| p > a && p < b));
    cuts.push(b);
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let panels = 32;
        let h = (w[1] - w[0]) / panels as f64;
        for p in 0..panels {
            let lo = w[0] + p as f64 * h;
            let (mid, half) = (lo + 0.5 * h, 0.5 * h);
            for (z, wt) in GL_NODES.iter().zip(GL_WEIGHTS) {
                total += wt * half * (m.density(mid - half * z) + m.density(mid + half * z));
            }
        }
    }
    total
}

pub fn closed_form_vs_quadrature(name: &str, a: f64, len: f64) -> Result<(), TestCaseError> {
    let m = mu(name);
    let exact = m.interval_mass(a, a + len);
    let q = quadrature(&m, a, a + len);
    ensure!(rel(exact, q) <= 1e-8, "{name}: [{a}, {}] closed form {exact} vs quadrature {q}", a + len);
    Ok(())
}

/// Exact `δ_y` level set against a midpoint scan out to the provable outer edge.
pub fn delta_vs_oracle(name: &str, y: f64, lambda: f64) -> Result<(), TestCaseError> {
    let m = mu(name);
    let exact = level_set_delta(&m, y, lambda).unwrap();
    let edge = 0.5 * (m.left_inverse(m.h(y) + 1.0 / lambda) + y);
    let nu = FiniteTestMeasure::atom(y, 1.0).unwrap();
    let scan = oracle_level_set(&m, &nu, lambda, edge * 1.05 + 1.0, 4000, 2);
    ensure!(rel(exact, scan) <= 1e-2, "{name}: y={y} λ={lambda}: exact {exact} vs scan {scan}");
    Ok(())
}

/// Unit increments, tail-sum window and doubling envelope of the block construction.
pub fn lemma_invariants(x0: f64, n1: u64, blocks: usize, seed: u64) -> Result<(), TestCaseError> {
    let model = BlockModel::new(CounterexampleParams { x0, n1, blocks }).unwrap();
    let rep = check_properties(&model, 8, seed).unwrap();
    for a in &rep.assertions {
        ensure!(a.passed, "x0={x0} n1={n1}: {} ({})", a.name, a.detail);
    }
    for s in &rep.unit_increment_stats {
        ensure!(s.max == 1.0, "x0={x0} n1={n1} block {}: max unit increment {}", s.block, s.max);
    }
    Ok(())
}

/// Point beyond which every ball meeting `supp ν` is too heavy: `Mν ≤ λ` there.
pub fn outer_edge(m: &DistributionMeasure, nu: &FiniteTestMeasure, lambda: f64) -> f64 {
    let r = nu.support_radius();
    0.5 * (m.left_inverse(m.h(r) + nu.total_mass() / lambda) + r)
}

/// The grid scan must land inside the certified bracket.
pub fn certified_vs_oracle(name: &str, nu: &FiniteTestMeasure, lambda: f64, nx: usize) -> Result<CertifiedInterval, TestCaseError> {
    let m = mu(name);
    let iv = level_set_nu_certified(&m, nu, lambda, 1e-3).unwrap();
    ensure!(iv.certified, "{name}: λ={lambda} not certified: {iv:?}");
    let edge = outer_edge(&m, nu, lambda);
    let scan = oracle_level_set(&m, nu, lambda, edge, nx, 4);
    // Each boundary point of the set can flip one scan cell; the set has at most
    // two boundary points per key point of ν plus the two outer ends.
    let cell = m.interval_mass(edge * (1.0 - 1.0 / nx as f64), edge);
    let flips = 2 * nu.atoms().len() + 4 * nu.steps().len() + 2;
    let slack = flips as f64 * cell;
    ensure!(iv.lo - slack <= scan && scan <= iv.hi + slack, "{name}: λ={lambda} scan {scan} outside {iv:?} ± {slack}");
    Ok(iv)
}

/// `H` nondecreasing on an ascending grid with `H(0) = 0`.
pub fn h_monotone(name: &str, xs: &[f64]) -> Result<(), TestCaseError> {
    let m = mu(name);
    ensure!(m.h(0.0) == 0.0, "{name}: H(0) = {}", m.h(0.0));
    let mut xs = xs.to_vec();
    xs.sort_by(f64::total_cmp);
    for w in xs.windows(2) {
        ensure!(m.h(w[0]) <= m.h(w[1]), "{name}: H({}) > H({})", w[0], w[1]);
    }
    Ok(())
}

/// `ν₁ + ν₂` ball masses add exactly.
pub fn nu_additive(a: &FiniteTestMeasure, b: &FiniteTestMeasure, x: f64, r: f64) -> Result<(), TestCaseError> {
    let s = a.plus(b).ball_mass(x, r);
    let parts = a.ball_mass(x, r) + b.ball_mass(x, r);
    ensure!(rel(s, parts) <= 4.0 * f64::EPSILON, "ν₁+ν₂ ball {s} vs {parts}");
    Ok(())
}

/// `λ₁ < λ₂` gives nested `δ_y` level sets, and `Ψ_{cδ_y}(cλ) = Ψ_{δ_y}(λ)` exactly.
pub fn delta_nesting_and_scaling(name: &str, y: f64, l1: f64, l2: f64, c: f64) -> Result<(), TestCaseError> {
    let m = mu(name);
    let (lo, hi) = (l1.min(l2), l1.max(l2));
    let (a, b) = (level_set_delta(&m, y, lo).unwrap(), level_set_delta(&m, y, hi).unwrap());
    ensure!(a >= b, "{name}: y={y} mass at λ={lo} is {a} < {b} at λ={hi}");
    let nu = FiniteTestMeasure::atom(y, 1.0).unwrap().scaled(c).unwrap();
    let direct = level_set_nu_certified(&m, &FiniteTestMeasure::atom(y, 1.0).unwrap(), hi, 1e-6).unwrap();
    let scaled = level_set_nu_certified(&m, &nu, c * hi, 1e-6).unwrap();
    ensure!(rel(direct.lo, scaled.lo) <= 4.0 * f64::EPSILON && rel(direct.hi, scaled.hi) <= 4.0 * f64::EPSILON,
        "{name}: Dirac scaling {direct:?} vs {scaled:?}");
    Ok(())
}
