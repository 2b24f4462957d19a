//! Centered Hardy–Littlewood maximal functions of finite measures on `[0, ∞)`
//! with respect to weighted measures, and the limiting weak-type behavior of
//! their level sets as `λ → 0⁺`.
//!
//! The crate is organised in four layers:
//!
//! * [`measure`]: weighted measures `μ` given by piecewise closed-form
//!   distribution functions `H(x) = μ([0, x])`, and finite test measures `ν`.
//! * [`maximal`]: pointwise evaluation of `M_μ ν(x) = sup_r ν(B(x,r)) / μ(B(x,r))`.
//! * [`weaklimit`]: level-set masses `μ{M_μ ν > λ}`, the ratio criteria and
//!   limit estimation over geometric grids.
//! * [`counterexample`]: the block construction of a piecewise-linear `G` and
//!   the measure `H = e^G − 1` whose weak-type limit oscillates at `δ₂`.

pub mod counterexample;
pub mod error;
pub mod grid;
pub mod maximal;
pub mod measure;
pub mod weaklimit;

pub use error::{Error, Result};
pub use grid::GridSpec;
pub use maximal::{maximal_delta, maximal_modified, maximal_nu, MaximalValue};
pub use measure::{
    ball_mass, h_eval, h_inverse, nu_ball_mass, preset, r_zero, DensitySegment,
    DistributionMeasure, FiniteTestMeasure, InverseSide, SegmentKind, Tail,
};
pub use weaklimit::{CertifiedInterval, LimitEstimate, SweepResult, SweepRow};
