use thiserror::Error;

/// Errors raised by constructors and loaders. Mathematical check failures are
/// not errors: they are returned as reports.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("structural error: {0}")]
    Structural(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown element label {0:?}")]
    UnknownLabel(String),
    #[error("model construction failed: {0}")]
    Model(String),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
