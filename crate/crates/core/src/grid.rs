use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Geometric grid `start · ratio^j`, `j = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridSpec {
    pub start: f64,
    pub ratio: f64,
    pub count: usize,
}

impl GridSpec {
    pub fn geometric(start: f64, ratio: f64, count: usize) -> Result<Self> {
        if !(start.is_finite() && start > 0.0) {
            return Err(Error::domain(format!("grid start must be positive, got {start}")));
        }
        if !(ratio.is_finite() && ratio > 0.0) || ratio == 1.0 {
            return Err(Error::domain(format!(
                "grid ratio must be positive and different from 1, got {ratio}"
            )));
        }
        if count == 0 {
            return Err(Error::domain("grid count must be at least 1"));
        }
        Ok(Self { start, ratio, count })
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.count)
            .map(|j| self.start * self.ratio.powi(j as i32))
            .collect()
    }

    pub fn is_decreasing(&self) -> bool {
        self.ratio < 1.0
    }
}

impl FromStr for GridSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |msg: &str| Error::Parse { line: 1, msg: format!("grid `{s}`: {msg}") };
        let rest = s
            .strip_prefix("geo:")
            .ok_or_else(|| bad("expected `geo:<start>:<ratio>:<count>`"))?;
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            return Err(bad("expected exactly three `:`-separated numbers"));
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad("bad start"))?;
        let ratio: f64 = parts[1].trim().parse().map_err(|_| bad("bad ratio"))?;
        let count: usize = parts[2].trim().parse().map_err(|_| bad("bad count"))?;
        Self::geometric(start, ratio, count)
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "geo:{}:{}:{}", self.start, self.ratio, self.count)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_generates() {
        let g: GridSpec = "geo:1e-1:0.5:4".parse().unwrap();
        assert_eq!(g.values(), vec![0.1, 0.05, 0.025, 0.0125]);
        assert!(g.is_decreasing());
        assert_eq!(g.to_string(), "geo:0.1:0.5:4");
    }

    #[test]
    fn rejects_malformed() {
        for s in ["lin:1:2:3", "geo:1:2", "geo:0:2:3", "geo:1:1:3", "geo:1:2:0", "geo:1:2:3:4"] {
            assert!(s.parse::<GridSpec>().is_err(), "{s}");
        }
    }
}
