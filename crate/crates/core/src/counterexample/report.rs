use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::graph::{build_g, counterexample_measure, lambda_floor, CounterexampleParams, PiecewiseLinearG};
use super::model::{scale2, BlockModel, Point};
use crate::error::{Error, Result};
use crate::grid::GridSpec;
use crate::measure::DistributionMeasure;
use crate::weaklimit::{criterion_ratio, sweep_delta, weak_limit_estimate, LimitEstimate, SweepResult};

const E_INV: f64 = 0.36787944117144233;
/// Absolute slack on height identities, which carry an `f64` block base.
const HEIGHT_SLACK: f64 = 1e-12;
/// Spread below which the `y = 0` ratios count as converged.
pub const CONVERGENCE_TOL: f64 = 1e-3;
const MAX_EXPLICIT_BLOCKS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockSummary {
    pub block: usize,
    pub n: u64,
    pub k: u64,
    pub log2_start: f64,
    pub height: f64,
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RangeStat {
    pub block: usize,
    pub min: f64,
    pub max: f64,
    pub probes: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioSample {
    pub block: usize,
    pub leg: u64,
    pub t: f64,
    pub u: f64,
    pub log2_r: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Assertion {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyReport {
    pub blocks: Vec<BlockSummary>,
    pub unit_increment_stats: Vec<RangeStat>,
    /// `G(2x) − G(x) − 1` per block.
    pub doubling_gap: Vec<RangeStat>,
    pub assertions: Vec<Assertion>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PrefixReport {
    pub blocks: usize,
    pub x_last: f64,
    pub lambda_floor: f64,
    pub sweep_y0: SweepResult,
    pub sweep_y2: SweepResult,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CounterexampleReport {
    pub params: CounterexampleParams,
    pub seed: u64,
    pub blocks: Vec<BlockSummary>,
    pub ratios_y0: Vec<RatioSample>,
    pub ratios_y2_generic: Vec<RatioSample>,
    pub ratios_y2_subseq: Vec<RatioSample>,
    pub shift_y2: Vec<RatioSample>,
    pub unit_increment_stats: Vec<RangeStat>,
    pub doubling_gap: Vec<RangeStat>,
    pub estimate_y0: LimitEstimate,
    pub estimate_y2: LimitEstimate,
    pub explicit_prefix: Option<PrefixReport>,
    pub assertions: Vec<Assertion>,
    pub passed: bool,
}

fn assertion(name: &str, passed: bool, detail: String) -> Assertion {
    Assertion { name: name.to_string(), passed, detail }
}

fn log2_of(model: &BlockModel, p: &Point) -> f64 {
    let s = model.block(p.block).start;
    if s.is_finite() {
        model.approx_x(p).log2()
    } else {
        model.block(p.block).log2_start + p.leg as f64
    }
}

fn probe_legs(k: u64, include_last: bool) -> Vec<u64> {
    let top = if include_last { k } else { k - 1 };
    if top <= 64 {
        return (0..=top).collect();
    }
    let mut legs: Vec<u64> = (0..8).chain(top - 7..=top).collect();
    let (a, b) = (8f64.ln(), ((top - 8) as f64).ln());
    for i in 0..32 {
        legs.push(((a + (b - a) * i as f64 / 31.0).exp().round() as u64).clamp(8, top - 8));
    }
    legs.sort_unstable();
    legs.dedup();
    legs
}

/// Probe points of block `b` whose double stays inside the construction.
pub fn block_probes(model: &BlockModel, b: usize, random: usize, seed: u64) -> Vec<Point> {
    let blk = *model.block(b);
    let last = b == model.block_count();
    let legs = probe_legs(blk.k, !last);
    let mut out = Vec::new();
    for &m in &legs {
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            out.push(Point::new(b, m, t, 0.0));
        }
        if m < blk.k {
            let e = m as i64 - blk.k as i64;
            if e > -1000 {
                for f in [0.25, 0.5, 0.75] {
                    out.push(Point::new(b, m, 1.0, scale2(f, e)));
                }
            }
            out.push(Point::new(b, m, 1.5f64.min(0.5 * (1.0 + blk.start)), 0.0));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ (b as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    let mut extra: Vec<Point> = (0..random)
        .map(|_| {
            let m = legs[rng.gen_range(0..legs.len())];
            let hi = if m == blk.k { 1.0 } else { blk.start.min(2.0) };
            Point::new(b, m, rng.gen_range(0.0..hi), 0.0)
        })
        .collect();
    extra.sort_by(|p, q| (p.leg, p.t).partial_cmp(&(q.leg, q.t)).unwrap());
    out.extend(extra);
    if last {
        out.retain(|p| model.height(&model.double(p)).is_ok() && model.height(&p.shifted(1.0)).is_ok());
    }
    out
}

fn summaries(model: &BlockModel) -> Vec<BlockSummary> {
    (1..=model.block_count())
        .map(|b| {
            let blk = model.block(b);
            BlockSummary {
                block: b,
                n: blk.n,
                k: blk.k,
                log2_start: blk.log2_start,
                height: blk.whole as f64 + blk.base,
                gap: blk.gap,
            }
        })
        .collect()
}

/// Unit-increment and doubling stats with their verdicts.
type BlockCheck = (RangeStat, RangeStat, bool, bool);

fn range_stat(block: usize, vals: &[f64]) -> RangeStat {
    RangeStat {
        block,
        min: vals.iter().copied().fold(f64::INFINITY, f64::min),
        max: vals.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        probes: vals.len(),
    }
}

/// Unit increments, doubling gaps and block bookkeeping over seeded probe grids.
pub fn check_properties(model: &BlockModel, probe_count: usize, seed: u64) -> Result<PropertyReport> {
    let nb = model.block_count();
    if nb < 3 {
        return Err(Error::InsufficientRows { need: 3, got: nb });
    }
    let per_block: Vec<BlockCheck> = (1..=nb)
        .into_par_iter()
        .map(|b| -> Result<_> {
            let n = model.block(b).n as f64;
            let mut unit = Vec::new();
            let mut dbl = Vec::new();
            for p in block_probes(model, b, probe_count, seed) {
                let g = model.height(&p)?;
                unit.push(model.height(&p.shifted(1.0))?.minus(&g));
                dbl.push(model.height(&model.double(&p))?.minus(&g) - 1.0);
            }
            let u = range_stat(b, &unit);
            let d = range_stat(b, &dbl);
            let unit_ok = (u.max - 1.0).abs() <= HEIGHT_SLACK && u.min <= 1.0 / n && u.min >= -HEIGHT_SLACK;
            let dbl_ok = d.min.abs().max(d.max.abs()) <= 2.0 / n + HEIGHT_SLACK;
            Ok((u, d, unit_ok, dbl_ok))
        })
        .collect::<Result<_>>()?;
    let blocks = summaries(model);
    let mut assertions = Vec::new();
    let bad = |f: &dyn Fn(&BlockCheck) -> bool| -> Vec<usize> {
        per_block.iter().filter(|r| !f(r)).map(|r| r.0.block).collect()
    };
    let unit_bad = bad(&|r| r.2);
    assertions.push(assertion(
        "unit_increment",
        unit_bad.is_empty(),
        format!("max G(x+1)−G(x) = 1 and min ≤ 1/n per block; failing blocks {unit_bad:?}"),
    ));
    let dbl_bad = bad(&|r| r.3);
    assertions.push(assertion(
        "doubling_envelope",
        dbl_bad.is_empty(),
        format!("|G(2x)−G(x)−1| ≤ 2/n per block; failing blocks {dbl_bad:?}"),
    ));
    let gap_bad: Vec<usize> =
        blocks.iter().filter(|s| !(s.gap >= 0.0 && s.gap < 1.0 / s.n as f64)).map(|s| s.block).collect();
    assertions.push(assertion(
        "tail_sum_window",
        gap_bad.is_empty(),
        format!("S(n,k) ∈ (1−1/n, 1] per block; failing blocks {gap_bad:?}"),
    ));
    let book_ok = model.blocks.windows(2).all(|w| w[1].n == w[0].n + w[0].k && w[1].whole == w[0].whole + w[0].k as i64);
    assertions.push(assertion("block_bookkeeping", book_ok, "n_(l+1) = n_l + k_l".into()));
    Ok(PropertyReport {
        blocks,
        unit_increment_stats: per_block.iter().map(|r| r.0).collect(),
        doubling_gap: per_block.iter().map(|r| r.1).collect(),
        assertions,
    })
}

fn sample(model: &BlockModel, p: Point, value: f64) -> RatioSample {
    RatioSample { block: p.block, leg: p.leg, t: p.t, u: p.u, log2_r: log2_of(model, &p), value }
}

fn ratios<F>(model: &BlockModel, blocks: std::ops::RangeInclusive<usize>, probes: usize, seed: u64, f: F) -> Result<Vec<RatioSample>>
where
    F: Fn(&Point) -> Result<f64> + Sync,
{
    let rows: Vec<Vec<RatioSample>> = blocks
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|b| {
            block_probes(model, b, probes, seed).into_iter().map(|p| Ok(sample(model, p, f(&p)?))).collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    Ok(rows.into_iter().flatten().collect())
}

fn values(s: &[RatioSample]) -> Vec<f64> {
    s.iter().map(|r| r.value).collect()
}

fn explicit_prefix(params: &CounterexampleParams) -> Option<(PiecewiseLinearG, DistributionMeasure)> {
    let mut blocks = params.blocks.min(MAX_EXPLICIT_BLOCKS);
    loop {
        match build_g(CounterexampleParams { blocks, ..*params }) {
            Ok(g) => return counterexample_measure(&g).ok().map(|mu| (g, mu)),
            Err(Error::Construction { block, .. }) if block > 1 && block - 1 < blocks => blocks = block - 1,
            Err(_) => return None,
        }
    }
}

/// λ-sweeps of the explicit prefix at `y = 0` and `y = 2`, above its `λ_floor`.
pub fn prefix_report(params: &CounterexampleParams) -> Result<Option<PrefixReport>> {
    let Some((g, mu)) = explicit_prefix(params) else { return Ok(None) };
    let floor = lambda_floor(&mu, &g);
    let count = (((floor / 0.1).ln() / 0.5f64.ln()).floor() as usize + 1).clamp(1, 40);
    let grid = GridSpec::geometric(0.1, 0.5, count)?;
    Ok(Some(PrefixReport {
        blocks: g.block_meta.len() - 1,
        x_last: g.x_range().1,
        lambda_floor: floor,
        sweep_y0: sweep_delta(&mu, 0.0, &grid)?,
        sweep_y2: sweep_delta(&mu, 2.0, &grid)?,
    }))
}

/// Criterion ratios of an explicit construction at `y = 0` and `y = 2` over `r_grid`,
/// with trailing-window estimates over the whole grid.
pub fn prop36_check(mu: &DistributionMeasure, g: &PiecewiseLinearG, r_grid: &[f64]) -> Result<(Vec<f64>, Vec<f64>, LimitEstimate, LimitEstimate)> {
    let (lo, hi) = g.x_range();
    let mut y0 = Vec::with_capacity(r_grid.len());
    let mut y2 = Vec::with_capacity(r_grid.len());
    for &r in r_grid {
        if !(r > 2.0 && r >= lo && 2.0 * r <= hi) {
            return Err(Error::Range { x: r, lo, hi: 0.5 * hi });
        }
        y0.push(criterion_ratio(mu, 0.0, r)?);
        y2.push(criterion_ratio(mu, 2.0, r)?);
    }
    let w = r_grid.len();
    let e0 = weak_limit_estimate(&y0, w, CONVERGENCE_TOL)?;
    let e2 = weak_limit_estimate(&y2, w, CONVERGENCE_TOL)?;
    Ok((y0, y2, e0, e2))
}

/// Builds the lazy model, runs every check and collects the assertions.
pub fn counterexample_report(params: CounterexampleParams, probe_count: usize, seed: u64) -> Result<CounterexampleReport> {
    let model = BlockModel::new(params)?;
    let props = check_properties(&model, probe_count, seed)?;
    let nb = model.block_count();
    let tail5 = nb.saturating_sub(4).max(1)..=nb;
    let tail3 = nb.saturating_sub(2).max(2)..=nb;

    let ratios_y0 = ratios(&model, tail5.clone(), probe_count, seed, |p| model.criterion_ratio(p, 0.0))?;
    let ratios_y2_generic = ratios(&model, tail3.clone(), probe_count, seed, |p| model.criterion_ratio(p, 2.0))?;
    let shift_y2 = ratios(&model, tail3.clone(), probe_count, seed, |p| model.shift_ratio(p, 2.0))?;
    let mut ratios_y2_subseq = Vec::new();
    for b in tail3.clone() {
        // r_b = (x_b + 2) / 2, which lies on leg k − 1 of the previous block.
        let prev = model.block(b - 1);
        let p = Point::new(b - 1, prev.k - 1, 1.0, 1.0);
        ratios_y2_subseq.push(sample(&model, p, model.criterion_ratio(&p, 2.0)?));
    }

    let y0_vals = values(&ratios_y0);
    let estimate_y0 = weak_limit_estimate(&y0_vals, y0_vals.len(), CONVERGENCE_TOL)?;
    let mut y2_all = ratios_y2_generic.clone();
    y2_all.extend(ratios_y2_subseq.iter().copied());
    y2_all.sort_by(|a, b| a.log2_r.partial_cmp(&b.log2_r).unwrap());
    let y2_vals = values(&y2_all);
    let estimate_y2 = weak_limit_estimate(&y2_vals, y2_vals.len(), CONVERGENCE_TOL)?;

    let mut assertions = props.assertions;
    let band = |v: f64| (v / E_INV - 1.0).abs() <= 0.15;
    let y0_bad = ratios_y0.iter().filter(|r| !band(r.value)).count();
    assertions.push(assertion(
        "ratios_y0_band",
        y0_bad == 0,
        format!("{} of {} ratios outside e⁻¹·(1 ± 0.15) over blocks {tail5:?}", y0_bad, ratios_y0.len()),
    ));
    let gmin = values(&ratios_y2_generic).into_iter().fold(f64::INFINITY, f64::min);
    assertions.push(assertion(
        "ratios_y2_generic_min",
        (0.30..=0.45).contains(&gmin),
        format!("min = {gmin} over blocks {tail3:?}, want [0.30, 0.45]"),
    ));
    let smin = values(&ratios_y2_subseq).into_iter().fold(f64::INFINITY, f64::min);
    assertions.push(assertion("ratios_y2_subseq", smin >= 0.7, format!("min = {smin}, want ≥ 0.7")));
    let spread2 = estimate_y2.limsup_est / estimate_y2.liminf_est;
    assertions.push(assertion(
        "estimate_y2_oscillates",
        !estimate_y2.converged && spread2 >= 1.8,
        format!("converged = {}, limsup/liminf = {spread2}", estimate_y2.converged),
    ));
    assertions.push(assertion(
        "estimate_y0_converges",
        estimate_y0.converged,
        format!("liminf = {}, limsup = {}", estimate_y0.liminf_est, estimate_y0.limsup_est),
    ));
    let sv = values(&shift_y2);
    let smax = sv.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let smin_shift = sv.iter().copied().fold(f64::INFINITY, f64::min);
    assertions.push(assertion(
        "shift_y2_spread",
        smax / smin_shift >= 0.5f64.exp(),
        format!("max/min of H(r−2)/H(r) = {}", smax / smin_shift),
    ));

    let explicit_prefix = prefix_report(&params)?;
    let passed = assertions.iter().all(|a| a.passed);
    Ok(CounterexampleReport {
        params,
        seed,
        blocks: props.blocks,
        ratios_y0,
        ratios_y2_generic,
        ratios_y2_subseq,
        shift_y2,
        unit_increment_stats: props.unit_increment_stats,
        doubling_gap: props.doubling_gap,
        estimate_y0,
        estimate_y2,
        explicit_prefix,
        assertions,
        passed,
    })
}
