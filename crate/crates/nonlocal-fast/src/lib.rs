//! Study harness behind the `nonlocal-fast` binary: manufactured solutions,
//! convergence studies, timing and diagnostics with CSV output.

pub mod cli;
pub mod csv;
pub mod diag;
pub mod manufactured;
pub mod poly;
pub mod study;
pub mod timing;
