//! Crate-wide error type.
//!
//! Every fallible operation in this crate reports through [`Error`]. The
//! variants are grouped roughly by layer: symbolic evaluation, input
//! validation, sampling, and numerical solves.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An expression referenced a variable the evaluation point does not bind.
    #[error("unbound variable `{0}` in evaluation point")]
    UnboundVariable(String),

    /// A subexpression evaluated to a non-finite value or hit a domain edge
    /// (log of a non-positive number, pole of tan/coth, division by zero).
    #[error("singular evaluation of `{subexpr}`: {detail}")]
    Singular { subexpr: String, detail: String },

    /// Malformed s-expression input.
    #[error("parse error: {0}")]
    Parse(String),

    /// A user-supplied pair of plane fields failed the conjugacy check.
    #[error(
        "rejected pair: residuals ({r1:.3e}, {r2:.3e}) at ({x}, {y}) exceed the conjugacy tolerance"
    )]
    RejectedPair { r1: f64, r2: f64, x: f64, y: f64 },

    /// Structurally valid input that cannot produce a meaningful result
    /// (constant potential, vanishing gradient, empty domain).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// A scalar parameter is outside its admissible range.
    #[error("parameter out of range: {0}")]
    Parameter(String),

    /// A mathematical precondition failed its sampled check.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// A sampled point fell outside the domain of validity of a construction.
    #[error("domain violation: {0}")]
    Domain(String),

    /// An operation was called with inconsistent arguments.
    #[error("usage: {0}")]
    Usage(String),

    /// A single sample could not be evaluated and was dropped.
    #[error("sample skipped: {0}")]
    SkippedSample(String),

    /// Every requested sample was skipped, so no residual statistics exist.
    #[error("empty report: all {requested} samples skipped ({skipped} near singular sets)")]
    EmptyReport { requested: usize, skipped: usize },

    /// Newton iteration failed to reach tolerance.
    #[error("Newton did not converge: residual {residual:.3e} after {iterations} iterations")]
    NewtonDiverged {
        iterations: usize,
        residual: f64,
        /// Residual sup-norm after each iteration, for diagnostics.
        trace: Vec<f64>,
    },

    /// A linear system could not be solved without pivoting.
    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    /// Invalid solver input (non-positive initial data, bad grid, bad step).
    #[error("solver input: {0}")]
    SolverInput(String),

    /// Malformed configuration or recipe file.
    #[error("config: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
}
