//! Harmonic-type sums: `k_n` and the block tail sums `S(n, m) = Σ_{j=1..m} 1/(n+j)`.

use super::dd::Dd;
use crate::error::{Error, Result};

/// Past this `n`, `k_n` is located through the digamma expansion.
const DIRECT_LIMIT: u64 = 65_536;
/// Below this argument the digamma expansion is not accurate enough.
const ASYMPTOTIC_FLOOR: u64 = 1_000;
const DECISION_MARGIN: f64 = 1e-26;

/// `ψ(z) − ln z` for `z ≥ 1000`, to about `1e−27`.
fn digamma_minus_ln(z: u64) -> Dd {
    let r = Dd::from_u64(z).recip();
    let r2 = r * r;
    let r4 = r2 * r2;
    let r6 = r4 * r2;
    -(r * Dd::from_f64(0.5)) - r2 / Dd::from_f64(12.0) + r4 / Dd::from_f64(120.0)
        - r6 / Dd::from_f64(252.0)
}

/// `ψ(b) − ψ(a) = Σ_{i=a}^{b−1} 1/i`, `ASYMPTOTIC_FLOOR ≤ a ≤ b`.
fn psi_diff(a: u64, b: u64) -> Dd {
    let ratio = Dd::from_u64(b) / Dd::from_u64(a);
    ratio.ln() + digamma_minus_ln(b) - digamma_minus_ln(a)
}

/// `Σ_{i=a}^{b−1} 1/i` in double-double.
fn harmonic_range(a: u64, b: u64) -> Dd {
    if b <= a {
        return Dd::ZERO;
    }
    if b - a <= 64 || b <= ASYMPTOTIC_FLOOR {
        let mut s = Dd::ZERO;
        for i in a..b {
            s = s + Dd::from_u64(i).recip();
        }
        return s;
    }
    if a < ASYMPTOTIC_FLOOR {
        return harmonic_range(a, ASYMPTOTIC_FLOOR) + psi_diff(ASYMPTOTIC_FLOOR, b);
    }
    psi_diff(a, b)
}

/// `S(n, m) = Σ_{j=1..m} 1/(n+j)`.
pub fn tail_sum_dd(n: u64, m: u64) -> Dd {
    harmonic_range(n + 1, n + 1 + m)
}

pub fn tail_sum(n: u64, m: u64) -> f64 {
    tail_sum_dd(n, m).to_f64()
}

/// `1 − S(n, m)`, without cancellation.
pub fn one_minus_tail_sum(n: u64, m: u64) -> f64 {
    (Dd::ONE - tail_sum_dd(n, m)).to_f64()
}

/// Smallest `k ≥ 0` with `Σ_{i=0..k} 1/(n+i) > 1`.
pub fn k_of_n(n: u64) -> Result<u64> {
    if n <= 1 {
        return Err(Error::domain(format!("k_n needs n ≥ 2, got {n}")));
    }
    if n <= DIRECT_LIMIT {
        let mut s = Dd::ZERO;
        let mut i = 0;
        loop {
            s = s + Dd::from_u64(n + i).recip();
            let excess = (s - Dd::ONE).to_f64();
            if excess.abs() < DECISION_MARGIN {
                return Err(Error::Numerical(format!("k_n undecidable at n = {n}")));
            }
            if excess > 0.0 {
                return Ok(i);
            }
            i += 1;
        }
    }
    // f(k) = Σ_{i=0..k} 1/(n+i) − 1 = ψ(n+k+1) − ψ(n) − 1, increasing in k.
    let f = |k: u64| -> Result<f64> {
        let end = n.checked_add(k + 1).ok_or_else(|| Error::Numerical("n + k overflows u64".into()))?;
        let v = (psi_diff(n, end) - Dd::ONE).to_f64();
        if v.abs() < DECISION_MARGIN {
            return Err(Error::Numerical(format!("k_n undecidable at n = {n}")));
        }
        Ok(v)
    };
    let mut k = ((n as f64) * (std::f64::consts::E - 1.0)) as u64;
    while f(k)? > 0.0 {
        k -= 1;
    }
    while f(k)? <= 0.0 {
        k += 1;
    }
    Ok(k)
}
