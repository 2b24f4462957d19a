use std::fmt::Write as _;

use anyhow::{bail, Result};
use clap::Args;
use hlweak_core::counterexample::{counterexample_report, CounterexampleParams};
use hlweak_core::measure::write_measure;
use hlweak_core::weaklimit::{
    criterion_ratio, delta_k as core_delta_k, doubling_diagnostic, sweep_delta, sweep_nu, weak_limit_estimate,
    write_sweep_csv,
};
use hlweak_core::{maximal_delta, maximal_modified, Error, GridSpec, LimitEstimate};
use serde::Serialize;
use serde_json::json;

use crate::{source, Common, Format, Output};

fn json_text<T: Serialize>(v: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(v)?;
    s.push('\n');
    Ok(s)
}

fn estimate_line(prefix: &str, e: &LimitEstimate) -> String {
    format!(
        "# {prefix}liminf={:.16e}\n# {prefix}limsup={:.16e}\n# {prefix}converged={}\n",
        e.liminf_est, e.limsup_est, e.converged
    )
}

#[derive(Args)]
pub struct CriterionArgs {
    #[arg(long)]
    measure: String,
    /// Comma-separated shifts y ≥ 0.
    #[arg(long, default_value = "0")]
    y: String,
    #[arg(long, default_value = "geo:10:2:20")]
    r_grid: GridSpec,
    /// Trailing window for the limit estimate (capped at the grid size).
    #[arg(long, default_value_t = 5)]
    window: usize,
    /// Spread below which the estimate counts as converged.
    #[arg(long, default_value_t = 1e-3)]
    conv_tol: f64,
}

#[derive(Serialize)]
struct CriterionRow {
    y: f64,
    r: f64,
    h_r: f64,
    h_2r_minus_y: f64,
    ratio: f64,
}

pub fn criterion(a: &CriterionArgs, c: &Common) -> Result<Output> {
    let mu = source::measure(&a.measure)?;
    if !mu.is_unbounded() {
        return Err(Error::Bounded.into());
    }
    let ys = source::list(&a.y)?;
    let rs = a.r_grid.values();
    let window = a.window.min(rs.len());
    let mut rows = Vec::new();
    let mut estimates = Vec::new();
    for &y in &ys {
        let mut ratios = Vec::with_capacity(rs.len());
        for &r in &rs {
            let ratio = criterion_ratio(&mu, y, r)?;
            ratios.push(ratio);
            rows.push(CriterionRow { y, r, h_r: mu.h(r), h_2r_minus_y: mu.h(2.0 * r - y), ratio });
        }
        estimates.push((y, weak_limit_estimate(&ratios, window, a.conv_tol)?));
    }
    let text = match c.format {
        Format::Json => json_text(&json!({
            "rows": rows,
            "estimates": estimates.iter().map(|(y, e)| json!({ "y": y, "estimate": e })).collect::<Vec<_>>(),
        }))?,
        _ => {
            let mut s = String::from("y,r,h_r,h_2r_minus_y,ratio\n");
            for r in &rows {
                let _ = writeln!(
                    s,
                    "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
                    r.y, r.r, r.h_r, r.h_2r_minus_y, r.ratio
                );
            }
            for (y, e) in &estimates {
                s.push_str(&estimate_line(&format!("y={y} "), e));
            }
            s
        }
    };
    Ok(Output { text, code: 0 })
}

#[derive(Args)]
pub struct SweepArgs {
    #[arg(long)]
    measure: String,
    /// Finite test measure; omit to sweep δ_y.
    #[arg(long)]
    nu: Option<String>,
    /// Atom position for a δ_y sweep (used when --nu is absent).
    #[arg(long)]
    y: Option<f64>,
    #[arg(long, default_value = "geo:1e-1:0.5:40")]
    lambda_grid: GridSpec,
    /// Certification tolerance on each level-set mass, relative to 1/λ.
    #[arg(long, default_value_t = 1e-4)]
    tol: f64,
    #[arg(long, default_value_t = 5)]
    window: usize,
    #[arg(long, default_value_t = 1e-3)]
    conv_tol: f64,
}

pub fn sweep(a: &SweepArgs, c: &Common) -> Result<Output> {
    let mu = source::measure(&a.measure)?;
    let sweep = match (&a.nu, a.y) {
        (Some(nu), _) => sweep_nu(&mu, &source::nu(nu)?, &a.lambda_grid, a.tol)?,
        (None, Some(y)) => sweep_delta(&mu, y, &a.lambda_grid)?,
        (None, None) => bail!("sweep needs --nu or --y"),
    };
    let est = weak_limit_estimate(&sweep, a.window.min(sweep.rows.len()), a.conv_tol)?;
    let text = match c.format {
        Format::Json => json_text(&json!({ "sweep": sweep, "estimate": est }))?,
        _ => {
            let mut buf = Vec::new();
            write_sweep_csv(&sweep, &mut buf)?;
            let mut s = String::from_utf8(buf)?;
            s.push_str(&estimate_line("", &est));
            s
        }
    };
    Ok(Output { text, code: if sweep.all_certified() { 0 } else { 2 } })
}

#[derive(Args)]
pub struct DeltaKArgs {
    #[arg(long)]
    measure: String,
    /// Comma-separated k > 0.
    #[arg(long)]
    k: String,
    #[arg(long, default_value = "geo:1e-2:0.1:3")]
    lambda_grid: GridSpec,
    /// Upper end of the x range scanned when k < 1.
    #[arg(long, default_value_t = 1e9)]
    x_cap: f64,
}

pub fn delta_k(a: &DeltaKArgs, c: &Common) -> Result<Output> {
    let mu = source::measure(&a.measure)?;
    let mut rows = Vec::new();
    for k in source::list(&a.k)? {
        for l in a.lambda_grid.values() {
            rows.push((k, l, core_delta_k(&mu, k, l, a.x_cap)?));
        }
    }
    let certified = rows.iter().all(|r| r.2.certified);
    let text = match c.format {
        Format::Json => json_text(
            &rows.iter().map(|(k, l, d)| json!({ "k": k, "lambda": l, "delta": d })).collect::<Vec<_>>(),
        )?,
        _ => {
            let mut s = String::from("k,lambda,delta_lo,delta_hi,certified\n");
            for (k, l, d) in &rows {
                let _ = writeln!(s, "{k:.16e},{l:.16e},{:.16e},{:.16e},{}", d.lo, d.hi, d.certified);
            }
            s
        }
    };
    Ok(Output { text, code: if certified { 0 } else { 2 } })
}

#[derive(Args)]
pub struct MaximalArgs {
    #[arg(long)]
    measure: String,
    #[arg(long)]
    nu: Option<String>,
    /// Atom position, when --nu is absent.
    #[arg(long)]
    y: Option<f64>,
    /// Comma-separated evaluation points.
    #[arg(long)]
    x: String,
    /// Denominator dilation k ≥ 1.
    #[arg(long, default_value_t = 1.0)]
    k: f64,
    /// Search refinement per active radius gap.
    #[arg(long, default_value_t = 8)]
    refine: usize,
}

pub fn maximal(a: &MaximalArgs, c: &Common) -> Result<Output> {
    let mu = source::measure(&a.measure)?;
    let nu = match (&a.nu, a.y) {
        (Some(nu), _) => Some(source::nu(nu)?),
        (None, Some(_)) => None,
        (None, None) => bail!("maximal needs --nu or --y"),
    };
    let mut rows = Vec::new();
    for x in source::list(&a.x)? {
        let v = match &nu {
            Some(nu) => maximal_modified(&mu, nu, a.k, x, a.refine)?,
            None => maximal_delta(&mu, a.y.unwrap_or(0.0), x)?,
        };
        rows.push((x, v));
    }
    let text = match c.format {
        Format::Json => json_text(&rows.iter().map(|(x, v)| json!({ "x": x, "maximal": v })).collect::<Vec<_>>())?,
        _ => {
            let mut s = String::from("x,value,radius,certified\n");
            for (x, v) in &rows {
                let r = v.attained_radius.map_or_else(String::new, |r| format!("{r:.16e}"));
                let _ = writeln!(s, "{x:.16e},{:.16e},{r},{}", v.value, v.certified);
            }
            s
        }
    };
    Ok(Output { text, code: 0 })
}

#[derive(Args)]
pub struct DoublingArgs {
    #[arg(long)]
    measure: String,
    #[arg(long, default_value = "geo:1:2:20")]
    x_grid: GridSpec,
    #[arg(long, default_value = "geo:1e-2:2:30")]
    r_grid: GridSpec,
}

pub fn doubling(a: &DoublingArgs, c: &Common) -> Result<Output> {
    let mu = source::measure(&a.measure)?;
    let rep = doubling_diagnostic(&mu, &a.x_grid.values(), &a.r_grid.values());
    let text = match c.format {
        Format::Json => json_text(&rep)?,
        _ => format!("c_est,violations\n{:.16e},{}\n", rep.c_est, rep.violations),
    };
    Ok(Output { text, code: 0 })
}

#[derive(Args)]
pub struct CounterexampleArgs {
    #[arg(long, default_value_t = 2.0)]
    x0: f64,
    #[arg(long, default_value_t = 2)]
    n1: u64,
    #[arg(long, default_value_t = 40)]
    blocks: usize,
    /// Random probes per block, on top of the fixed grid.
    #[arg(long, default_value_t = 16)]
    probes: usize,
}

/// Always JSON; exit 2 when any assertion fails.
pub fn counterexample(a: &CounterexampleArgs, c: &Common) -> Result<Output> {
    let params = CounterexampleParams { x0: a.x0, n1: a.n1, blocks: a.blocks };
    let rep = counterexample_report(params, a.probes, c.seed)?;
    for f in rep.assertions.iter().filter(|f| !f.passed) {
        eprintln!("assertion failed: {}: {}", f.name, f.detail);
    }
    Ok(Output { text: json_text(&rep)?, code: if rep.passed { 0 } else { 2 } })
}

pub fn measure_show(src: &str, c: &Common) -> Result<Output> {
    let mu = source::measure(src)?;
    let text = match c.format {
        Format::Json => json_text(&mu)?,
        _ => write_measure(&mu),
    };
    Ok(Output { text, code: 0 })
}
