use thiserror::Error;

use crate::net::LinkId;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no connected topology with {node_count} nodes after {attempts} attempts (edge probability {edge_probability})")]
    GenerationFailure {
        node_count: usize,
        attempts: usize,
        edge_probability: f64,
    },

    #[error("entangled link {0} is already allocated")]
    DoubleAllocation(LinkId),

    #[error("inconsistent input: {0}")]
    Inconsistency(String),

    #[error("invariant violated: {0}")]
    InvariantViolation(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code reported by the `entroute` binary.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidParameter(_) | Error::Config(_) | Error::Json(_) | Error::Io(_) => 2,
            Error::GenerationFailure { .. } => 3,
            Error::DoubleAllocation(_) | Error::Inconsistency(_) | Error::InvariantViolation(_) => 4,
        }
    }
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
