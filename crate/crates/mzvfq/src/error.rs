use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("inexact division: {0}")]
    Inexact(String),
    #[error("unsupported operation: {0}")]
    Unsupported(String),
    #[error("degree or exponent overflow")]
    Overflow,
    #[error("invalid place: {0}")]
    InvalidPlace(String),
    #[error("outside the convergence domain: {0}")]
    Domain(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error("assembly failure: {0}")]
    Assembly(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(pos: usize, msg: impl Into<String>) -> Self {
        Error::Parse { pos, msg: msg.into() }
    }
}
