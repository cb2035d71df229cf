use thiserror::Error;

use crate::degree::Degree;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("rank mismatch: {left} vs {right}")]
    RankMismatch { left: usize, right: usize },

    #[error("degree {p} is not below {q}")]
    DegreeNotBelow { p: Degree, q: Degree },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{0}")]
    Invalid(String),

    #[error("factorisation property violated: {reason} (witness path {witness})")]
    Factorisation { reason: String, witness: String },

    #[error("not composable: s({left}) != r({right})")]
    NotComposable { left: String, right: String },

    #[error("unknown name: {0}")]
    UnknownName(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("unsupported domain: {0}")]
    Unsupported(String),

    #[error("search truncated at bound: {0}")]
    Truncated(String),
}

pub type Result<T> = std::result::Result<T, Error>;
