use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
mod source;

#[derive(Parser)]
#[command(name = "hlweak", version, about = "Centered maximal functions and their weak-type limits on [0, ∞)")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    common: Common,
}

#[derive(Args, Clone)]
pub struct Common {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Write to this file instead of standard output.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for randomized probe grids.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
    /// Measure file grammar (`measure show` only).
    File,
}

#[derive(Subcommand)]
enum Command {
    /// Ratios H(r) / H(2r − y) over an r grid.
    Criterion(commands::CriterionArgs),
    /// λ ↦ λ·μ{M_μ ν > λ} over a λ grid.
    Sweep(commands::SweepArgs),
    /// Δ_μ(k, λ) over k and λ grids.
    DeltaK(commands::DeltaKArgs),
    /// Pointwise maximal function values.
    Maximal(commands::MaximalArgs),
    /// Doubling-constant diagnostic of μ.
    Doubling(commands::DoublingArgs),
    /// Build the block counterexample and check its properties.
    Counterexample(commands::CounterexampleArgs),
    /// Inspect measures.
    Measure {
        #[command(subcommand)]
        cmd: MeasureCmd,
    },
}

#[derive(Subcommand)]
enum MeasureCmd {
    /// Print a measure as a measure file or as JSON.
    Show {
        #[arg(long)]
        measure: String,
    },
}

/// What a command produced: text for the sink plus its exit code.
pub struct Output {
    pub text: String,
    pub code: u8,
}

fn run(cli: Cli) -> Result<u8> {
    let c = &cli.common;
    let out = match &cli.command {
        Command::Criterion(a) => commands::criterion(a, c)?,
        Command::Sweep(a) => commands::sweep(a, c)?,
        Command::DeltaK(a) => commands::delta_k(a, c)?,
        Command::Maximal(a) => commands::maximal(a, c)?,
        Command::Doubling(a) => commands::doubling(a, c)?,
        Command::Counterexample(a) => commands::counterexample(a, c)?,
        Command::Measure { cmd: MeasureCmd::Show { measure } } => commands::measure_show(measure, c)?,
    };
    match &c.out {
        Some(path) => std::fs::write(path, &out.text)?,
        None => std::io::stdout().lock().write_all(out.text.as_bytes())?,
    }
    Ok(out.code)
}

fn main() -> ExitCode {
    // Usage errors exit 1; 2 is reserved for bounded measures and uncertified rows.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            match e.downcast_ref::<hlweak_core::Error>() {
                Some(hlweak_core::Error::Bounded) => ExitCode::from(2),
                _ => ExitCode::from(1),
            }
        }
    }
}
