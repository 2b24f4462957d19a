//! Level sets `{x : M_μ ν(x) > λ}`, their `μ`-masses as `λ → 0⁺`, and the ratio
//! criteria that predict the limit.

mod bisect;
mod certified;
mod criteria;
mod csv;
mod delta;
mod doubling;
mod estimate;
mod oracle;

use serde::Serialize;

pub use certified::{level_set_nu_certified, sweep_nu};
pub use criteria::{criterion_ratio, shift_ratio};
pub use csv::{write_sweep_csv, SWEEP_CSV_HEADER};
pub use delta::{delta_k, level_set_delta, sweep_delta, thm22_minus, thm22_plus};
pub use doubling::{doubling_diagnostic, DoublingReport};
pub use estimate::{weak_limit_estimate, LimitSeries};
pub use oracle::{oracle_level_set, oracle_modified_level_set, OracleScan};

/// `lo ≤ value ≤ hi` whenever `certified`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifiedInterval {
    pub lo: f64,
    pub hi: f64,
    pub certified: bool,
}

impl CertifiedInterval {
    pub fn exact(v: f64) -> Self {
        Self { lo: v, hi: v, certified: true }
    }

    pub fn mid(&self) -> f64 {
        if self.hi.is_infinite() {
            return self.hi;
        }
        0.5 * (self.lo + self.hi)
    }

    pub fn radius(&self) -> f64 {
        0.5 * (self.hi - self.lo)
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { lo: c * self.lo, hi: c * self.hi, certified: self.certified }
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lo <= v && v <= self.hi
    }

    pub fn overlaps(&self, other: &Self) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub mass: CertifiedInterval,
    pub lambda_mass: CertifiedInterval,
}

impl SweepRow {
    pub fn new(lambda: f64, mass: CertifiedInterval) -> Self {
        Self { lambda, mass, lambda_mass: mass.scaled(lambda) }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    pub grid: Option<crate::GridSpec>,
}

impl SweepResult {
    pub fn all_certified(&self) -> bool {
        self.rows.iter().all(|r| r.mass.certified)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LimitEstimate {
    pub liminf_est: f64,
    pub limsup_est: f64,
    pub window: usize,
    pub converged: bool,
}
