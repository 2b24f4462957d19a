//! Block construction of a piecewise-linear `G` with `G(x+1) − G(x)` oscillating
//! between 0 and 1 while `G(2x) − G(x) → 1`, and the measure `H = e^G − 1`.

mod dd;
mod graph;
mod harmonic;
mod model;
mod report;

pub use dd::Dd;
pub use harmonic::{k_of_n, one_minus_tail_sum, tail_sum, tail_sum_dd};
pub use graph::{build_g, counterexample_measure, eval_g, lambda_floor, BlockMeta, CounterexampleParams, PiecewiseLinearG};
pub use model::{h_ratio, Block, BlockModel, Height, Point};
pub use report::{
    block_probes, check_properties, counterexample_report, prefix_report, prop36_check, Assertion, BlockSummary,
    CounterexampleReport, PrefixReport, PropertyReport, RangeStat, RatioSample, CONVERGENCE_TOL,
};
