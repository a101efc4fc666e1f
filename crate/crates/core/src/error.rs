//! Error types shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Parameter regime or grid configuration rejected before any computation.
    #[error("configuration error: {0}")]
    Config(String),

    /// Parameter validation failure listing every violated clause.
    #[error("invalid parameters: {}", .0.join("; "))]
    InvalidParams(Vec<String>),

    /// An input fell outside the domain of a closed-form expression.
    #[error("domain error: {0}")]
    Domain(String),

    /// A theorem or estimate was queried outside its hypotheses.
    #[error("hypothesis not satisfied: {0}")]
    Hypothesis(String),

    /// Nehari projection failed to bracket a root.
    #[error("fiber projection failure: {0}")]
    Projection(String),

    /// Breakdown in the linear algebra or non-finite state.
    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("estimation error: {0}")]
    Estimation(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code: 1 for configuration/hypothesis problems,
    /// 2 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Numerical(_) | Error::Projection(_) | Error::Estimation(_) => 2,
            _ => 1,
        }
    }
}
