use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unbounded set: {0}")]
    UnboundedSet(&'static str),

    #[error("invalid set: {0}")]
    InvalidSet(String),

    #[error("unknown problem `{0}`")]
    UnknownProblem(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: String, reason: String },

    #[error("invalid config: {0}")]
    InvalidConfig(String),

    #[error("incompatible noise: {0}")]
    IncompatibleNoise(String),

    #[error("oracle does not provide {0}")]
    MissingOracle(&'static str),

    #[error("missing constant `{0}`")]
    MissingConstant(&'static str),

    #[error("zero subgradient off-optimum at iteration {iter} (gap {gap})")]
    ZeroSubgradient { iter: usize, gap: f64 },

    #[error("no productive steps")]
    NoProductiveSteps,

    #[error("exit criterion unreachable after {doublings} doublings at iteration {iter}")]
    ExitCriterionUnreachable { iter: usize, doublings: usize },

    #[error("unsupported problem: {0}")]
    UnsupportedProblem(String),

    #[error("infeasible starting point (residual {0})")]
    InfeasibleStart(f64),

    #[error("{0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, OptError>;

pub(crate) fn invalid_param(name: &str, reason: impl Into<String>) -> OptError {
    OptError::InvalidParam {
        name: name.to_string(),
        reason: reason.into(),
    }
}
