use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("degree parity cannot be even: {0}")]
    ParityImpossible(String),

    #[error("no even-sum degree sequence after {attempts} attempts")]
    RejectionBudget { attempts: usize },

    #[error("total degree {0} is odd")]
    OddTotalDegree(u64),

    #[error("graphs have different vertex counts ({left} vs {right})")]
    VertexCountMismatch { left: usize, right: usize },

    #[error("{what} needs n <= {cap}, got n = {n}")]
    Capacity {
        what: &'static str,
        n: usize,
        cap: usize,
    },

    #[error("structural inconsistency: {0}")]
    Structural(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("all {0} replicas were truncated by the caps")]
    AllTruncated(usize),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error in {path}: {msg}")]
    Parse { path: PathBuf, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 config, 3 capacity, 4 numeric.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Capacity { .. } => 3,
            Error::Numeric(_) | Error::AllTruncated(_) | Error::Structural(_) => 4,
            Error::Config(_)
            | Error::Parse { .. }
            | Error::InvalidParameter(_)
            | Error::ParityImpossible(_)
            | Error::OddTotalDegree(_)
            | Error::VertexCountMismatch { .. } => 2,
            Error::RejectionBudget { .. } => 4,
            Error::Io(_) | Error::Json(_) => 1,
        }
    }
}
