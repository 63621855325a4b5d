use thiserror::Error;

use crate::hmm::Diagnostic;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("basis vectors are linearly dependent")]
    DependentBasis,

    #[error("invalid atom: {0}")]
    InvalidAtom(String),

    #[error("parse error at column {column}: {message}")]
    Parse { column: usize, message: String },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid finite model: {0}")]
    InvalidFiniteModel(String),

    #[error("model has {} validation error(s); first: {}", .0.len(), .0.first().map(|d| d.message.as_str()).unwrap_or(""))]
    InvalidModel(Vec<Diagnostic>),

    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
}
