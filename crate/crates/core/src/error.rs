use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("infeasible scenario: {0}")]
    Infeasible(String),

    #[error("convex solver failed at SCA iteration {iteration}: {message}")]
    Solver { iteration: usize, message: String },

    #[error("start point is not strictly feasible (max constraint value {max_violation:e})")]
    InfeasibleStart { max_violation: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
