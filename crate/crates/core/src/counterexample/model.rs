//! Lazy form of the block construction that never materializes `x` as an `f64`.
//!
//! A point is `(block b, leg m, t, u)` meaning `x = 2^m (s_b + t) + u`, where `s_b` is the
//! start of block `b`. Leg `m` has `A_m` at `t = 0`, `B_m` at `t = 1`, `C_m` at
//! `t = 1 + 2^{−k}` and ends at `A_{m+1}`, `t = s_b`. Heights are kept as
//! integer part + block base + local offset so that differences stay exact-ish
//! even when `G` itself is around `10^17`.

use serde::Serialize;

use super::graph::CounterexampleParams;
use super::harmonic::{k_of_n, one_minus_tail_sum};
use crate::error::{Error, Result};

const MAX_NORMALIZE_STEPS: usize = 100_000;

/// `x · 2^e`, saturating.
pub(crate) fn scale2(x: f64, e: i64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    if e > 3000 {
        return x.signum() * f64::INFINITY;
    }
    if e < -3200 {
        return x.signum() * 0.0;
    }
    let a = e / 3;
    let b = (e - a) / 2;
    let c = e - a - b;
    x * 2f64.powi(a as i32) * 2f64.powi(b as i32) * 2f64.powi(c as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Block {
    pub n: u64,
    pub k: u64,
    /// `s_b`; `+∞` once it leaves the `f64` range.
    pub start: f64,
    pub log2_start: f64,
    /// `v_b = whole + base`.
    pub whole: i64,
    pub base: f64,
    /// `1 − S(n, k)`, the height deficit of the block's end.
    pub gap: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    pub block: usize,
    pub leg: u64,
    pub t: f64,
    pub u: f64,
}

impl Point {
    pub fn new(block: usize, leg: u64, t: f64, u: f64) -> Self {
        Self { block, leg, t, u }
    }

    pub fn shifted(self, du: f64) -> Self {
        Self { u: self.u + du, ..self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Height {
    pub whole: i64,
    pub base: f64,
    pub local: f64,
}

impl Height {
    pub const ZERO: Height = Height { whole: 0, base: 0.0, local: 0.0 };

    pub fn value(&self) -> f64 {
        self.whole as f64 + self.base + self.local
    }

    /// `self − other`.
    pub fn minus(&self, other: &Height) -> f64 {
        (self.whole - other.whole) as f64 + (self.base - other.base) + (self.local - other.local)
    }
}

/// `(e^{g1} − 1) / (e^{g2} − 1)`; `+∞` when the denominator vanishes.
pub fn h_ratio(g1: &Height, g2: &Height) -> f64 {
    let (a, b) = (g1.value(), g2.value());
    if b <= 0.0 {
        return f64::INFINITY;
    }
    g1.minus(g2).exp() * ((-a).exp_m1() / (-b).exp_m1())
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Located {
    Before,
    At { block: usize, leg: u64, t: f64, u: f64 },
    End,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockModel {
    pub params: CounterexampleParams,
    /// Blocks `1..=params.blocks`, then the end point as a block of its own.
    pub blocks: Vec<Block>,
}

impl BlockModel {
    pub fn new(params: CounterexampleParams) -> Result<Self> {
        params.validate()?;
        let mut blocks = Vec::with_capacity(params.blocks + 1);
        let mut cur = Block {
            n: params.n1,
            k: 0,
            start: params.x0,
            log2_start: params.x0.log2(),
            whole: 0,
            base: 0.0,
            gap: 0.0,
        };
        for b in 1..=params.blocks + 1 {
            cur.k = k_of_n(cur.n).map_err(|e| Error::Construction { block: b, msg: e.to_string() })?;
            cur.gap = one_minus_tail_sum(cur.n, cur.k);
            if b <= params.blocks && cur.start.is_finite() && !(cur.start - 1.0 > scale2(1.0, -(cur.k as i64))) {
                return Err(Error::Construction {
                    block: b,
                    msg: format!("C_m overtakes A_(m+1): start {} ≤ 1 + 2^-{}", cur.start, cur.k),
                });
            }
            blocks.push(cur);
            let overflow = |what: &str| Error::Construction { block: b, msg: format!("{what} overflows") };
            let next_log2 = cur.k as f64
                + if cur.log2_start > 60.0 { cur.log2_start } else { (cur.start + 1.0).log2() };
            cur = Block {
                n: cur.n.checked_add(cur.k).ok_or_else(|| overflow("n"))?,
                k: 0,
                start: scale2(cur.start + 1.0, cur.k as i64),
                log2_start: next_log2,
                whole: i64::try_from(cur.k).ok().and_then(|k| cur.whole.checked_add(k)).ok_or_else(|| overflow("height"))?,
                base: cur.base + cur.gap,
                gap: 0.0,
            };
        }
        Ok(Self { params, blocks })
    }

    pub fn block_count(&self) -> usize {
        self.params.blocks
    }

    pub fn block(&self, b: usize) -> &Block {
        &self.blocks[b - 1]
    }

    /// Block start as a point, `b = blocks + 1` being the end of the construction.
    pub fn start(&self, b: usize) -> Point {
        Point::new(b, 0, 0.0, 0.0)
    }

    /// Approximate `x` (may be `+∞`), for messages and ordering within `f64` range.
    pub fn approx_x(&self, p: &Point) -> f64 {
        scale2(self.block(p.block).start + p.t, p.leg as i64) + p.u
    }

    /// `2x`.
    pub fn double(&self, p: &Point) -> Point {
        let blk = self.block(p.block);
        if p.leg < blk.k || p.block > self.block_count() {
            return Point::new(p.block, p.leg + 1, p.t, 2.0 * p.u);
        }
        let t = if p.t == 1.0 { 0.0 } else { scale2(p.t - 1.0, blk.k as i64) };
        Point::new(p.block + 1, 1, t, 2.0 * p.u)
    }

    fn range_error(&self, p: &Point) -> Error {
        let last = self.blocks[self.blocks.len() - 1];
        Error::Range { x: self.approx_x(p), lo: self.params.x0, hi: last.start }
    }

    fn locate(&self, p: &Point) -> Result<Located> {
        let (mut b, mut m, mut t, mut u) = (p.block, p.leg, p.t, p.u);
        if b == 0 || b > self.blocks.len() {
            return Err(self.range_error(p));
        }
        let end = self.blocks.len();
        for _ in 0..MAX_NORMALIZE_STEPS {
            if t.is_nan() || u.is_nan() {
                return Err(Error::Numerical(format!("point {p:?} lost precision")));
            }
            let blk = self.blocks[b - 1];
            let s = blk.start;
            if m > blk.k {
                return Err(Error::domain(format!("leg {m} exceeds k = {} of block {b}", blk.k)));
            }
            if t + scale2(u, -(m as i64)) < 0.0 {
                if m == 0 {
                    if b == 1 {
                        return Ok(Located::Before);
                    }
                    b -= 1;
                    u += t;
                    m = self.blocks[b - 1].k;
                    t = 1.0;
                } else {
                    m -= 1;
                    t = if s.is_infinite() { f64::INFINITY } else { s + 2.0 * t };
                }
                continue;
            }
            if b == end {
                if m == 0 && t == 0.0 && u == 0.0 {
                    return Ok(Located::End);
                }
                return Err(self.range_error(p));
            }
            if m == blk.k {
                let d = if t == 1.0 { u } else { scale2(t - 1.0, m as i64) + u };
                if d > 0.0 {
                    t = if t == 1.0 { 0.0 } else { scale2(t - 1.0, m as i64) };
                    b += 1;
                    m = 0;
                    continue;
                }
                return Ok(Located::At { block: b, leg: m, t, u });
            }
            if s.is_finite() && (t - s) + scale2(u, -(m as i64)) >= 0.0 {
                m += 1;
                t = (t - s) / 2.0;
                continue;
            }
            return Ok(Located::At { block: b, leg: m, t, u });
        }
        Err(Error::Numerical(format!("point {p:?} did not normalize")))
    }

    /// `G` at a point, with `G ≡ 0` before the first block.
    pub fn height(&self, p: &Point) -> Result<Height> {
        let (b, m, t, u) = match self.locate(p)? {
            Located::Before => return Ok(Height::ZERO),
            Located::End => {
                let e = self.blocks[self.blocks.len() - 1];
                return Ok(Height { whole: e.whole, base: e.base, local: 0.0 });
            }
            Located::At { block, leg, t, u } => (block, leg, t, u),
        };
        let blk = self.blocks[b - 1];
        let whole = blk.whole + m as i64;
        let base = blk.base;
        let oms = if m == blk.k { blk.gap } else { one_minus_tail_sum(blk.n, m) };
        // Offset from B_m in x units.
        let d = if t == 1.0 { u } else { scale2(t - 1.0, m as i64) + u };
        if d <= 0.0 {
            let tau = (t + scale2(u, -(m as i64))).clamp(0.0, 1.0);
            return Ok(Height { whole, base, local: tau * oms });
        }
        let frac = scale2(d, blk.k as i64 - m as i64);
        if frac <= 1.0 {
            return Ok(Height { whole, base, local: oms + (1.0 - oms) * frac });
        }
        Ok(Height { whole: whole + 1, base, local: 0.0 })
    }

    /// `H(r) / H(2r − y)`.
    pub fn criterion_ratio(&self, r: &Point, y: f64) -> Result<f64> {
        let g1 = self.height(r)?;
        let g2 = self.height(&self.double(r).shifted(-y))?;
        Ok(h_ratio(&g1, &g2))
    }

    /// `H(r − y) / H(r)`.
    pub fn shift_ratio(&self, r: &Point, y: f64) -> Result<f64> {
        let g1 = self.height(&r.shifted(-y))?;
        let g2 = self.height(r)?;
        Ok(h_ratio(&g1, &g2))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counterexample::graph::build_g;

    fn params(blocks: usize) -> CounterexampleParams {
        CounterexampleParams { x0: 2.0, n1: 2, blocks }
    }

    #[test]
    fn points_just_below_a_leg_start_normalize() {
        let model = BlockModel::new(params(6)).unwrap();
        for b in 1..6 {
            for m in 1..=model.block(b).k {
                let h = model.height(&Point::new(b, m, 0.0, -2.0));
                assert!(h.is_ok(), "block {b} leg {m}: {h:?}");
            }
        }
    }

    #[test]
    fn agrees_with_explicit_prefix() {
        let g = build_g(params(3)).unwrap();
        let model = BlockModel::new(params(3)).unwrap();
        assert_eq!(model.block(3).start, 832.0);
        let mut checked = 0;
        for b in 1..=3 {
            let blk = *model.block(b);
            for m in 0..=blk.k {
                for &t in &[0.0, 0.3, 1.0, 1.0 + 2f64.powi(-(blk.k as i32) - 1), 1.7, 5.0] {
                    for &u in &[0.0, -0.6, 0.25, 1.0, -2.0] {
                        let p = Point::new(b, m, t, u);
                        let x = model.approx_x(&p);
                        let Ok(want) = g.eval(x) else { continue };
                        let got = model.height(&p).unwrap().value();
                        assert!((got - want).abs() < 1e-9, "b={b} m={m} t={t} u={u} x={x}: {got} vs {want}");
                        checked += 1;
                    }
                }
            }
        }
        assert!(checked > 300);
        assert_eq!(model.height(&Point::new(1, 0, 0.0, -0.5)).unwrap(), Height::ZERO);
        assert!(model.height(&Point::new(3, 16, 1.0, 0.5)).is_err());
        assert!(model.height(&Point::new(4, 0, 0.0, 0.0)).is_ok());
    }

    #[test]
    fn doubling_matches_coordinates() {
        let model = BlockModel::new(params(3)).unwrap();
        for p in [Point::new(1, 2, 0.5, 0.3), Point::new(2, 5, 1.0, -0.2), Point::new(2, 6, 0.25, 0.0)] {
            let q = model.double(&p);
            assert!((model.approx_x(&q) - 2.0 * model.approx_x(&p)).abs() < 1e-9);
        }
    }

    #[test]
    fn degenerate_start_rejected() {
        let err = BlockModel::new(CounterexampleParams { x0: 1.0, n1: 2, blocks: 3 }).unwrap_err();
        assert!(matches!(err, Error::Construction { block: 1, .. }));
    }

    #[test]
    fn deep_blocks_stay_consistent() {
        let model = BlockModel::new(params(40)).unwrap();
        let last = model.block(40);
        assert!(last.n > 1_000_000_000_000_000);
        assert!(last.start.is_infinite() && last.log2_start > 1e16);
        for b in 2..=40 {
            let blk = model.block(b);
            let s = model.start(b);
            let g0 = model.height(&s).unwrap();
            let g1 = model.height(&s.shifted(1.0)).unwrap();
            assert_eq!(g1.minus(&g0), 1.0, "block {b}");
            assert!(blk.gap > 0.0 && blk.gap < 1.0 / blk.n as f64);
            // Subsequence point (x_b + 2) / 2 sits past C_(k−1) of the previous block.
            let prev = model.block(b - 1);
            let r = Point::new(b - 1, prev.k - 1, 1.0, 1.0);
            let sub = model.criterion_ratio(&r, 2.0).unwrap();
            let y0 = model.criterion_ratio(&s, 0.0).unwrap();
            if b >= 10 {
                assert!(sub > 0.7, "block {b}: {sub}");
                assert!((y0 * 1f64.exp() - 1.0).abs() < 1e-3, "block {b}: {y0}");
            }
        }
    }
}
