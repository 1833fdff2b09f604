//! Error type shared by all modules.

use thiserror::Error;

/// Errors produced by constructors, checkers, and solvers.
///
/// Validation *findings* (axiom violations, failed fibration conditions) are
/// not errors; they are reported through [`crate::ValidationReport`] and
/// [`crate::Verdict`]. An `Error` means the computation itself could not be
/// carried out.
#[derive(Debug, Error)]
pub enum Error {
    /// An enumeration or search exceeded its step budget.
    #[error("budget exceeded while {0}")]
    BudgetExceeded(String),

    /// A referenced cell does not exist at the stated dimension.
    #[error("unknown {dim}-cell `{id}`")]
    UnknownCell { dim: usize, id: String },

    /// A composition or comparison was attempted on cells whose boundaries
    /// do not match.
    #[error("incompatible boundaries: {0}")]
    IncompatibleBoundaries(String),

    /// A term does not satisfy the grammar's well-formedness conditions.
    #[error("ill-formed term: {0}")]
    IllFormedTerm(String),

    /// Structurally invalid input (bad parameters, inconsistent files).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A fixed-point iterate grew, contradicting the promised monotonicity.
    #[error("operator is not monotone: iterate grew at step {0}")]
    NonMonotone(usize),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
