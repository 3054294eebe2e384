//! CSV output. Floating values print in Rust's shortest round-trip form, so
//! identical studies produce byte-identical files apart from the wall-time
//! column.

use crate::study::ConvergenceRecord;
use std::io::{self, Write};

pub const STUDY_HEADER: &str = "problem,gamma,M,tau,error_inf,rate,cgs_iters_max,wall_seconds";

pub fn write_study(records: &[ConvergenceRecord], out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "{STUDY_HEADER}")?;
    for r in records {
        let rate = r.rate.map(|v| v.to_string()).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            r.problem, r.gamma, r.m, r.tau, r.error_inf, rate, r.cgs_iters_max, r.wall_seconds
        )?;
    }
    Ok(())
}

pub fn write_timing(rows: &[(usize, f64)], out: &mut dyn Write) -> io::Result<()> {
    writeln!(out, "M,seconds")?;
    for (m, s) in rows {
        writeln!(out, "{m},{s}")?;
    }
    Ok(())
}
