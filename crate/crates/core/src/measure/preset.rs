use super::distribution::{DistributionMeasure, Tail};
use super::periodic::PeriodicTail;
use super::segment::SegmentKind;
use crate::error::{Error, Result};

pub const PRESET_NAMES: [&str; 5] = ["lebesgue", "logweight", "expweight", "periodic", "flatgap"];

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicParams {
    pub period: f64,
    pub profile: Vec<(f64, f64, f64)>,
}

impl Default for PeriodicParams {
    /// Sawtooth: density 2 on the first half of each unit period, 0 on the second.
    fn default() -> Self {
        Self { period: 1.0, profile: vec![(0.0, 0.5, 2.0), (0.5, 1.0, 0.0)] }
    }
}

/// Named measures: `lebesgue` (h = 1), `logweight` (h = 1/(x+1)), `expweight`
/// (h = eˣ), `periodic` (step profile repeated from 0) and `flatgap` (h = 1 except
/// a zero gap on `[1, 2)`).
pub fn preset(name: &str, params: Option<&PeriodicParams>) -> Result<DistributionMeasure> {
    if params.is_some() && name != "periodic" {
        return Err(Error::invalid(format!("preset `{name}` takes no parameters")));
    }
    match name {
        "lebesgue" => DistributionMeasure::new(vec![(0.0, SegmentKind::Constant { c: 1.0 })], Tail::Extend),
        "logweight" => DistributionMeasure::new(
            vec![(0.0, SegmentKind::Reciprocal { a: 1.0, c: 1.0 })],
            Tail::Extend,
        ),
        "expweight" => DistributionMeasure::new(
            vec![(0.0, SegmentKind::Exponential { a: 1.0, b: 1.0 })],
            Tail::Extend,
        ),
        "flatgap" => DistributionMeasure::new(
            vec![
                (0.0, SegmentKind::Constant { c: 1.0 }),
                (1.0, SegmentKind::Constant { c: 0.0 }),
                (2.0, SegmentKind::Constant { c: 1.0 }),
            ],
            Tail::Extend,
        ),
        "periodic" => {
            let p = params.cloned().unwrap_or_default();
            let tail = PeriodicTail::new(p.period, p.profile, 0.0)?;
            DistributionMeasure::new(vec![], Tail::Periodic(tail))
        }
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

/// Parses `name` or `periodic:<T>:<a>,<b>,<h>;<a>,<b>,<h>...`.
pub fn preset_from_spec(spec: &str) -> Result<DistributionMeasure> {
    let Some(rest) = spec.strip_prefix("periodic:") else {
        return preset(spec, None);
    };
    let bad = |msg: String| Error::Parse { line: 1, msg: format!("`{spec}`: {msg}") };
    let (t, prof) = rest.split_once(':').ok_or_else(|| bad("expected `periodic:<T>:<profile>`".into()))?;
    let period: f64 = t.trim().parse().map_err(|_| bad(format!("bad period `{t}`")))?;
    let mut profile = Vec::new();
    for step in prof.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let v: Vec<f64> = step
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| bad(format!("bad profile step `{step}`")))?;
        if v.len() != 3 {
            return Err(bad(format!("profile step `{step}` needs a,b,h")));
        }
        profile.push((v[0], v[1], v[2]));
    }
    preset("periodic", Some(&PeriodicParams { period, profile }))
}
