use std::path::PathBuf;

use thiserror::Error;

/// Errors surfaced by the library and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("capacity exceeded: {what} needs {requested}, budget is {budget}")]
    Capacity {
        what: &'static str,
        requested: usize,
        budget: usize,
    },

    #[error("range error: {0}")]
    Range(String),

    #[error("coverage error: {0}")]
    Coverage(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature step {step} too coarse, need at most {max_step}")]
    StepTooCoarse { step: f64, max_step: f64 },

    #[error("covariance factorization failed after jitter escalation up to {jitter}")]
    Decomposition { jitter: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// CLI exit code: 1 check failure, 2 usage, 3 capacity.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Capacity { .. } => 3,
            Error::Config(_) | Error::Precondition(_) | Error::Range(_) => 2,
            _ => 1,
        }
    }

    pub fn io(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Error {
        let path = path.into();
        move |source| Error::Io { path, source }
    }
}
