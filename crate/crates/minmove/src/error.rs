//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error at {line}:{col}: {msg}")]
    Parse { line: usize, col: usize, msg: String },

    #[error("variable `{0}` is bound more than once")]
    DuplicateBinding(String),

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("formula is not in prenex form")]
    NonPrenex,

    #[error("formula is not quantifier-free")]
    NotQuantifierFree,

    #[error("cannot substitute quantified variable `{0}`")]
    SubstituteBound(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("instance too large: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
