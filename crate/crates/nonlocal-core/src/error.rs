//! Error type shared by the whole crate.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum CoreError {
    /// Kernel exponent outside the supported open interval (0, 1).
    InvalidExponent(f64),
    /// Grid endpoints or element count do not describe a usable mesh.
    InvalidGrid { a: f64, b: f64, m: usize },
    /// A vector length does not match the operator dimension.
    DimensionMismatch { expected: usize, got: usize },
    /// The time grid does not divide the final time into whole steps.
    InvalidTimeGrid { tau: f64, t_final: f64 },
    /// An inner product used by CGS collapsed relative to the initial residual.
    CgsBreakdown { iteration: usize },
    /// A time stepper aborted because the linear solve failed at some step.
    StepFailed { step: usize, source: Box<CoreError> },
    /// BDF4 was asked to run without the four starting vectors it needs.
    MissingHistory { have: usize },
    /// Quadrature setup rejected (order too low or refinement ceiling reached).
    QuadratureFailure { detail: String },
    /// Dense diagnostics refused a problem above the desk-scale cap.
    SizeCapExceeded { size: usize, cap: usize },
}

impl fmt::Display for CoreError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CoreError::InvalidExponent(g) => {
                write!(f, "kernel exponent gamma = {g} must lie strictly inside (0, 1)")
            }
            CoreError::InvalidGrid { a, b, m } => {
                write!(f, "invalid collocation grid: a = {a}, b = {b}, M = {m} (need a < b, M >= 2)")
            }
            CoreError::DimensionMismatch { expected, got } => {
                write!(f, "dimension mismatch: expected {expected}, got {got}")
            }
            CoreError::InvalidTimeGrid { tau, t_final } => {
                write!(f, "time step tau = {tau} does not evenly divide T = {t_final}")
            }
            CoreError::CgsBreakdown { iteration } => {
                write!(f, "CGS breakdown at iteration {iteration}")
            }
            CoreError::StepFailed { step, source } => {
                write!(f, "time step {step} failed: {source}")
            }
            CoreError::MissingHistory { have } => {
                write!(f, "BDF4 needs 4 starting vectors, got {have}")
            }
            CoreError::QuadratureFailure { detail } => write!(f, "quadrature failure: {detail}"),
            CoreError::SizeCapExceeded { size, cap } => {
                write!(f, "dense diagnostics limited to {cap} unknowns, requested {size}")
            }
        }
    }
}

impl std::error::Error for CoreError {}
