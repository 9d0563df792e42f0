use std::path::PathBuf;

use optlab::OptError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("config error: {0}")]
    Config(String),

    #[error("{context}: {source}")]
    Method {
        context: String,
        #[source]
        source: OptError,
    },

    #[error("i/o error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("trace format error: {0}")]
    Format(String),

    #[error(transparent)]
    Opt(#[from] OptError),
}

pub type Result<T> = std::result::Result<T, BenchError>;

fn opt_is_validation(e: &OptError) -> bool {
    matches!(
        e,
        OptError::DimensionMismatch { .. }
            | OptError::UnboundedSet(_)
            | OptError::InvalidSet(_)
            | OptError::UnknownProblem(_)
            | OptError::InvalidParam { .. }
            | OptError::InvalidConfig(_)
            | OptError::IncompatibleNoise(_)
            | OptError::MissingOracle(_)
            | OptError::MissingConstant(_)
            | OptError::UnsupportedProblem(_)
            | OptError::InfeasibleStart(_)
    )
}

impl BenchError {
    pub fn is_validation(&self) -> bool {
        match self {
            BenchError::Config(_) => true,
            BenchError::Method { source, .. } | BenchError::Opt(source) => opt_is_validation(source),
            BenchError::Io { .. } | BenchError::Format(_) => false,
        }
    }

    /// 2 for validation errors, 1 for runtime failures.
    pub fn exit_code(&self) -> i32 {
        if self.is_validation() {
            2
        } else {
            1
        }
    }
}
