use std::io::{self, Write};

use super::SweepResult;

pub const SWEEP_CSV_HEADER: &str = "lambda,mass_lo,mass_hi,lambda_mass_lo,lambda_mass_hi,certified";

/// One row per λ, 17 significant digits, LF line endings.
pub fn write_sweep_csv<W: Write>(sweep: &SweepResult, mut w: W) -> io::Result<()> {
    writeln!(w, "{SWEEP_CSV_HEADER}")?;
    for r in &sweep.rows {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{}",
            r.lambda, r.mass.lo, r.mass.hi, r.lambda_mass.lo, r.lambda_mass.hi, r.mass.certified
        )?;
    }
    Ok(())
}
