use serde::Serialize;

use super::harmonic::{k_of_n, tail_sum};
use crate::error::{Error, Result};
use crate::measure::{DistributionMeasure, SegmentKind, Tail};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CounterexampleParams {
    pub x0: f64,
    pub n1: u64,
    pub blocks: usize,
}

impl Default for CounterexampleParams {
    fn default() -> Self {
        Self { x0: 2.0, n1: 2, blocks: 40 }
    }
}

impl CounterexampleParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.x0.is_finite() && self.x0 >= 1.0) {
            return Err(Error::domain(format!("x0 must be ≥ 1, got {}", self.x0)));
        }
        if self.n1 < 2 {
            return Err(Error::domain(format!("n1 must be ≥ 2, got {}", self.n1)));
        }
        if self.blocks == 0 {
            return Err(Error::domain("blocks must be ≥ 1"));
        }
        Ok(())
    }
}

/// Per-block bookkeeping: block `l` starts at `x`, at height `v`, with `n_l` and `k_l`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BlockMeta {
    pub n: u64,
    pub k: u64,
    pub x: f64,
    pub v: f64,
}

/// Explicit vertex list of `G`, in `f64`. Only the first few blocks are representable.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseLinearG {
    pub vertices: Vec<(f64, f64)>,
    /// One entry per block plus the end point of the last block.
    pub block_meta: Vec<BlockMeta>,
    pub params: CounterexampleParams,
}

fn push_vertex(out: &mut Vec<(f64, f64)>, block: usize, x: f64, g: f64) -> Result<()> {
    if let Some(&(px, pg)) = out.last() {
        if x == px && g == pg {
            return Ok(());
        }
        if !(x > px) {
            return Err(Error::Construction {
                block,
                msg: format!("vertex x-coordinates not increasing: {px} then {x}"),
            });
        }
        if g < pg {
            return Err(Error::Construction { block, msg: format!("G decreases from {pg} to {g} at x = {x}") });
        }
    }
    out.push((x, g));
    Ok(())
}

pub fn build_g(params: CounterexampleParams) -> Result<PiecewiseLinearG> {
    params.validate()?;
    let mut vertices = Vec::new();
    let mut meta = Vec::with_capacity(params.blocks + 1);
    let (mut x, mut n, mut v) = (params.x0, params.n1, 0.0f64);
    for block in 1..=params.blocks {
        let k = k_of_n(n)?;
        meta.push(BlockMeta { n, k, x, v });
        if k > 1000 {
            return Err(Error::Construction { block, msg: format!("k = {k} exceeds f64 range") });
        }
        for m in 0..=k {
            let p = 2f64.powi(m as i32);
            let s = tail_sum(n, m);
            push_vertex(&mut vertices, block, p * x, v + m as f64)?;
            push_vertex(&mut vertices, block, p * x + p, v + m as f64 + 1.0 - s)?;
            if m < k {
                let c = p * x + p + 2f64.powi(m as i32 - k as i32);
                push_vertex(&mut vertices, block, c, v + m as f64 + 1.0)?;
            }
        }
        let p = 2f64.powi(k as i32);
        v += k as f64 + 1.0 - tail_sum(n, k);
        x = p * x + p;
        n = n
            .checked_add(k)
            .ok_or_else(|| Error::Construction { block, msg: "n overflows".into() })?;
    }
    meta.push(BlockMeta { n, k: k_of_n(n)?, x, v });
    Ok(PiecewiseLinearG { vertices, block_meta: meta, params })
}

impl PiecewiseLinearG {
    pub fn x_range(&self) -> (f64, f64) {
        (self.vertices[0].0, self.vertices[self.vertices.len() - 1].0)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        let (lo, hi) = self.x_range();
        if !(x >= lo && x <= hi) {
            return Err(Error::Range { x, lo, hi });
        }
        let i = self.vertices.partition_point(|&(vx, _)| vx <= x);
        if i == self.vertices.len() {
            return Ok(self.vertices[i - 1].1);
        }
        let (x1, g1) = self.vertices[i - 1];
        let (x2, g2) = self.vertices[i];
        Ok(g1 + (x - x1) * (g2 - g1) / (x2 - x1))
    }
}

pub fn eval_g(g: &PiecewiseLinearG, x: f64) -> Result<f64> {
    g.eval(x)
}

/// `H = e^G − 1`, flat zero on `[0, x0]`, with the last leg extended to `+∞`.
pub fn counterexample_measure(g: &PiecewiseLinearG) -> Result<DistributionMeasure> {
    let mut segs = Vec::with_capacity(g.vertices.len());
    let (x0, _) = g.vertices[0];
    if x0 > 0.0 {
        segs.push((0.0, SegmentKind::Constant { c: 0.0 }));
    }
    for w in g.vertices.windows(2) {
        let ((xa, ga), (xb, gb)) = (w[0], w[1]);
        let slope = (gb - ga) / (xb - xa);
        let kind = if slope == 0.0 {
            SegmentKind::Constant { c: 0.0 }
        } else {
            SegmentKind::Exponential { a: slope * ga.exp(), b: slope }
        };
        segs.push((xa, kind));
    }
    // The last segment carries the tail.
    DistributionMeasure::new(segs, Tail::Extend)
}

/// Smallest λ whose level set stays inside the constructed range.
pub fn lambda_floor(mu: &DistributionMeasure, g: &PiecewiseLinearG) -> f64 {
    let (_, x_last) = g.x_range();
    1.0 / (mu.h(x_last) - mu.h(2.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_block_vertices() {
        let g = build_g(CounterexampleParams { x0: 2.0, n1: 2, blocks: 1 }).unwrap();
        let want = [(2.0, 0.0), (3.0, 1.0), (3.25, 1.0), (4.0, 1.0), (6.0, 5.0 / 3.0), (6.5, 2.0), (8.0, 2.0), (12.0, 29.0 / 12.0)];
        assert_eq!(g.vertices.len(), want.len());
        for (a, b) in g.vertices.iter().zip(want) {
            assert_eq!(a.0, b.0);
            assert!((a.1 - b.1).abs() < 1e-15, "{a:?} vs {b:?}");
        }
        let end = g.block_meta[1];
        assert_eq!((end.x, end.n), (12.0, 4));
        assert!((end.v - 29.0 / 12.0).abs() < 1e-15);
        assert!((eval_g(&g, 5.0).unwrap() - 4.0 / 3.0).abs() < 1e-15);
        assert_eq!(eval_g(&g, 7.0).unwrap(), 2.0);
        assert_eq!(eval_g(&g, 2.0).unwrap(), 0.0);
        assert!(matches!(eval_g(&g, 13.0), Err(Error::Range { lo, hi, .. }) if lo == 2.0 && hi == 12.0));
    }

    #[test]
    fn recursion_and_collapse() {
        let g = build_g(CounterexampleParams { x0: 2.0, n1: 2, blocks: 3 }).unwrap();
        assert_eq!(g.block_meta[2].x, 832.0);
        for w in g.block_meta.windows(2) {
            assert_eq!(w[1].n, w[0].n + w[0].k);
            assert_eq!(w[1].x, 2f64.powi(w[0].k as i32) * (w[0].x + 1.0));
        }
        for w in g.block_meta[..3].iter() {
            assert_eq!(g.eval(w.x + 1.0).unwrap() - g.eval(w.x).unwrap(), 1.0);
        }
        let err = build_g(CounterexampleParams { x0: 2.0, n1: 2, blocks: 5 }).unwrap_err();
        assert!(matches!(err, Error::Construction { block: 4, .. }), "{err}");
        let err = build_g(CounterexampleParams { x0: 1.0, n1: 2, blocks: 3 }).unwrap_err();
        assert!(matches!(err, Error::Construction { block: 1, .. }), "{err}");
    }

    #[test]
    fn measure_matches_exp_g() {
        let g = build_g(CounterexampleParams { x0: 2.0, n1: 2, blocks: 3 }).unwrap();
        let mu = counterexample_measure(&g).unwrap();
        assert_eq!(mu.h(2.0), 0.0);
        assert_eq!(mu.h(1.0), 0.0);
        assert!((mu.h(3.0) - 1.718281828459045235).abs() < 1e-14);
        assert!((mu.h(8.0) - 6.389056098930650227).abs() < 1e-13);
        for &(x, gx) in &g.vertices {
            let want = gx.exp_m1();
            assert!((mu.h(x) - want).abs() <= 1e-10 * want.max(1e-300), "x={x}");
        }
        let floor = lambda_floor(&mu, &g);
        assert!(floor > 0.0 && floor < 1e-6);
    }
}
