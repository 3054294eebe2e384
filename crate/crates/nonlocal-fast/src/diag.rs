//! Dense spectral diagnostics exposed through the CLI: dominance gap, norm
//! and condition bounds, and the eigenvalue extremes of the symmetric part.

use nonlocal_core::analysis::{
    dominance_report, kappa_bound_1d, row_gap_lower_bound_1d, DenseMatrix,
};
use nonlocal_core::error::CoreError;
use nonlocal_core::kernels2d::{
    assemble_additive, build_multiplicative, Grid2D, QuadratureSpec,
};
use nonlocal_core::pqc::{assemble_operator, CollocationGrid, WeaklySingularKernel};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagProblem {
    OneD,
    MultiplicativeKernel2d,
    AdditiveKernel2d,
}

impl DiagProblem {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "1d" => Some(DiagProblem::OneD),
            "2d-mult" => Some(DiagProblem::MultiplicativeKernel2d),
            "2d-add" => Some(DiagProblem::AdditiveKernel2d),
            _ => None,
        }
    }

    pub fn all_ids() -> &'static [&'static str] {
        &["1d", "2d-mult", "2d-add"]
    }
}

/// Key/value CSV lines describing the dense diagnostics of one operator.
pub fn run_diagnostics(
    problem: DiagProblem,
    gamma: f64,
    m: usize,
    threads: usize,
) -> Result<String, CoreError> {
    let kernel = WeaklySingularKernel::new(gamma)?;
    let (dense, extra): (DenseMatrix, Vec<(String, f64)>) = match problem {
        DiagProblem::OneD => {
            let grid = CollocationGrid::new(0.0, 1.0, m)?;
            let op = assemble_operator(&grid, &kernel)?;
            let extra = vec![
                ("kappa_inf_bound".to_string(), kappa_bound_1d(&grid, &kernel)),
                ("row_gap_lower_bound".to_string(), row_gap_lower_bound_1d(&grid, &kernel)),
            ];
            (op.dense(), extra)
        }
        DiagProblem::MultiplicativeKernel2d => {
            let grid = Grid2D::square(0.0, 1.0, m)?;
            let op = build_multiplicative(&grid, &kernel)?;
            let extra = vec![("diagonal_bound".to_string(), op.diagonal_bound())];
            (op.dense(), extra)
        }
        DiagProblem::AdditiveKernel2d => {
            let grid = Grid2D::square(0.0, 1.0, m)?;
            let quad = QuadratureSpec { threads, ..QuadratureSpec::default() };
            let op = assemble_additive(&grid, &kernel, &quad)?;
            let extra = vec![("diagonal_bound".to_string(), op.diagonal_bound())];
            (op.dense(), extra)
        }
    };
    let report = dominance_report(&dense)?.with_symmetric_extremes(&dense)?;
    let mut out = String::from("key,value\n");
    out.push_str(&format!("dim,{}\n", report.dim));
    out.push_str(&format!("min_row_dominance_gap,{}\n", report.min_row_dominance_gap));
    out.push_str(&format!("inf_norm,{}\n", report.inf_norm));
    out.push_str(&format!("inv_inf_norm_bound,{}\n", report.inv_inf_norm_bound));
    out.push_str(&format!("cond_bound,{}\n", report.cond_bound));
    out.push_str(&format!("h_min_eig,{}\n", report.h_min_eig.unwrap()));
    out.push_str(&format!("h_max_eig,{}\n", report.h_max_eig.unwrap()));
    for (k, v) in extra {
        out.push_str(&format!("{k},{v}\n"));
    }
    Ok(out)
}
