//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field order {q}: {reason}")]
    InvalidField { q: u64, reason: String },

    #[error("inverse of zero")]
    ZeroInverse,

    #[error("{0} is not a square")]
    NotASquare(u32),

    #[error("dimension mismatch: {0}")]
    Dim(String),

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is not alternate")]
    NotAlternate,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("label {label} is not valid for q={q}, nu={nu}")]
    InvalidLabel { label: String, q: u64, nu: usize },

    #[error("subspace is not a vertex of the last subconstituent: {0}")]
    NotInLambda(String),

    #[error("cap exceeded: {0}")]
    CapExceeded(String),

    #[error("association scheme axiom violated: {0}")]
    AxiomViolation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
