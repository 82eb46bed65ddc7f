use std::io;

use thiserror::Error;

/// Errors raised by the solvers, diagnostics and configuration layer.
#[derive(Debug, Error)]
pub enum TricapError {
    #[error("non-finite value in {what} at cell {cell}")]
    NonFinite { what: &'static str, cell: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("spreading state: phase {phase} has non-positive spreading coefficient {value:.6}")]
    Spreading { phase: usize, value: f64 },

    #[error("linear solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    SolverDiverged { iterations: usize, residual: f64 },

    #[error("surfactant mobility is not positive at cell {cell} (value {value:.3e})")]
    DegenerateMobility { cell: usize, value: f64 },

    #[error("no triple junction found")]
    NoJunction,

    #[error("too few eta-junctions for triple {triple:?}: found {found}, need {needed}")]
    TooFewPoints {
        triple: (usize, usize, usize),
        found: usize,
        needed: usize,
    },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("point ({x:.6}, {y:.6}) lies outside the domain")]
    OutsideDomain { x: f64, y: f64 },

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, TricapError>;
