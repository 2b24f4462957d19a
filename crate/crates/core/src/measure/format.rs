use std::fmt::Write;

use super::distribution::{DistributionMeasure, Tail};
use super::periodic::PeriodicTail;
use super::segment::SegmentKind;
use crate::error::{Error, Result};

/// Parses the line-based measure format:
///
/// ```text
/// # comment
/// segment <t_start> constant <c>
/// segment <t_start> exp <a> <b>
/// segment <t_start> recip <a> <c>
/// tail periodic <T> [<start>]
/// profile <a> <b> <height>
/// ```
///
/// The periodic start defaults to 0, which requires no `segment` lines.
pub fn parse_measure(text: &str) -> Result<DistributionMeasure> {
    let mut segments = Vec::new();
    let mut periodic: Option<(f64, Option<f64>)> = None;
    let mut profile = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |msg: String| Error::Parse { line: i + 1, msg };
        let parts: Vec<&str> = line.split_whitespace().collect();
        let num = |s: &str| s.parse::<f64>().map_err(|_| bad(format!("bad number `{s}`")));
        match parts.as_slice() {
            ["segment", t, kind, rest @ ..] => {
                if periodic.is_some() {
                    return Err(bad("segment after periodic tail".into()));
                }
                let t = num(t)?;
                let kind = match (*kind, rest) {
                    ("constant", [c]) => SegmentKind::Constant { c: num(c)? },
                    ("exp", [a, b]) => SegmentKind::Exponential { a: num(a)?, b: num(b)? },
                    ("recip", [a, c]) => SegmentKind::Reciprocal { a: num(a)?, c: num(c)? },
                    _ => return Err(bad(format!("bad segment `{line}`"))),
                };
                if let Some(&(prev, _)) = segments.last() {
                    if t <= prev {
                        return Err(bad(format!("segment start {t} is not ascending")));
                    }
                } else if t != 0.0 {
                    return Err(bad(format!("first segment must start at 0, got {t}")));
                }
                segments.push((t, kind));
            }
            ["tail", "periodic", rest @ ..] => {
                if periodic.is_some() {
                    return Err(bad("duplicate tail".into()));
                }
                match rest {
                    [t] => periodic = Some((num(t)?, None)),
                    [t, s] => periodic = Some((num(t)?, Some(num(s)?))),
                    _ => return Err(bad("expected `tail periodic <T> [<start>]`".into())),
                }
            }
            ["profile", a, b, h] => {
                if periodic.is_none() {
                    return Err(bad("profile line before `tail periodic`".into()));
                }
                profile.push((num(a)?, num(b)?, num(h)?));
            }
            _ => return Err(bad(format!("unrecognised line `{line}`"))),
        }
    }
    let tail = match periodic {
        None => Tail::Extend,
        Some((period, start)) => {
            let start = match start {
                Some(s) => s,
                None if segments.is_empty() => 0.0,
                None => {
                    return Err(Error::Parse {
                        line: 0,
                        msg: "periodic tail after segments needs an explicit start".into(),
                    })
                }
            };
            Tail::Periodic(PeriodicTail::new(period, profile, start)?)
        }
    };
    if segments.is_empty() && matches!(tail, Tail::Extend) {
        return Err(Error::Parse { line: 0, msg: "no segments".into() });
    }
    DistributionMeasure::new(segments, tail)
}

/// Inverse of [`parse_measure`]; numbers use shortest round-trip formatting.
pub fn write_measure(mu: &DistributionMeasure) -> String {
    let mut out = String::new();
    for s in mu.segments() {
        let _ = match s.kind {
            SegmentKind::Constant { c } => writeln!(out, "segment {} constant {}", s.t_start, c),
            SegmentKind::Exponential { a, b } => writeln!(out, "segment {} exp {} {}", s.t_start, a, b),
            SegmentKind::Reciprocal { a, c } => writeln!(out, "segment {} recip {} {}", s.t_start, a, c),
        };
    }
    if let Tail::Periodic(p) = mu.tail() {
        let _ = writeln!(out, "tail periodic {} {}", p.period, p.start);
        for &(a, b, h) in &p.profile {
            let _ = writeln!(out, "profile {a} {b} {h}");
        }
    }
    out
}
