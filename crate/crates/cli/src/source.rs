use std::path::Path;

use anyhow::{bail, Context, Result};
use hlweak_core::counterexample::{build_g, counterexample_measure, CounterexampleParams};
use hlweak_core::measure::{parse_measure, preset_from_spec, PRESET_NAMES};
use hlweak_core::{DistributionMeasure, FiniteTestMeasure};

fn read(path: &str) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {path}"))
}

/// `<preset>`, `periodic:<T>:<profile>`, `counterexample:<x0>:<n1>:<blocks>`,
/// `file:<path>` or a bare path to a measure file.
pub fn measure(src: &str) -> Result<DistributionMeasure> {
    if let Some(path) = src.strip_prefix("file:") {
        return Ok(parse_measure(&read(path)?)?);
    }
    if let Some(rest) = src.strip_prefix("counterexample:") {
        let parts: Vec<&str> = rest.split(':').collect();
        if parts.len() != 3 {
            bail!("expected counterexample:<x0>:<n1>:<blocks>, got `{src}`");
        }
        let params = CounterexampleParams {
            x0: parts[0].parse().with_context(|| format!("bad x0 `{}`", parts[0]))?,
            n1: parts[1].parse().with_context(|| format!("bad n1 `{}`", parts[1]))?,
            blocks: parts[2].parse().with_context(|| format!("bad blocks `{}`", parts[2]))?,
        };
        return Ok(counterexample_measure(&build_g(params)?)?);
    }
    if src.starts_with("periodic:") || PRESET_NAMES.contains(&src) {
        return Ok(preset_from_spec(src)?);
    }
    if Path::new(src).is_file() {
        return Ok(parse_measure(&read(src)?)?);
    }
    bail!("unknown measure `{src}` (presets: {})", PRESET_NAMES.join(", "))
}

/// Inline `atom:<p>:<m>;step:<a>:<b>:<h>`, `file:<path>` or a bare path.
pub fn nu(src: &str) -> Result<FiniteTestMeasure> {
    if let Some(path) = src.strip_prefix("file:") {
        return Ok(FiniteTestMeasure::parse_file(&read(path)?)?);
    }
    if !src.contains(':') && Path::new(src).is_file() {
        return Ok(FiniteTestMeasure::parse_file(&read(src)?)?);
    }
    Ok(FiniteTestMeasure::parse_inline(src)?)
}

pub fn list(src: &str) -> Result<Vec<f64>> {
    src.split(',')
        .map(|s| s.trim().parse::<f64>().with_context(|| format!("bad number `{s}`")))
        .collect()
}
