//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series does not terminate: {0}")]
    NonTerminating(String),

    #[error("lower-parameter pole at term index {index}")]
    Pole { index: usize },

    #[error("acceleration unreliable: two runs agree to {achieved} digits, {requested} requested")]
    AccelerationUnreliable { achieved: u32, requested: u32 },

    #[error("unsupported sequence family: {0}")]
    UnsupportedFamily(String),

    #[error("unknown identity id: {0}")]
    UnknownId(String),

    #[error("missing parameter: {0}")]
    MissingParam(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
