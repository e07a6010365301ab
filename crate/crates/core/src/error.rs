use thiserror::Error;

pub type Result<T> = std::result::Result<T, QbmError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QbmError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A symplectic eigenvalue fell below the uncertainty bound by more than
    /// the round-off window.
    #[error(
        "state violates the uncertainty principle: symplectic eigenvalue {eigenvalue:.12e} < 1"
    )]
    Physicality { eigenvalue: f64 },

    #[error("unstable model: stiffness eigenvalue {eigenvalue:.6e} is not positive")]
    ModelInstability { eigenvalue: f64 },

    #[error("numerical integration failed: {0}")]
    Integration(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

impl QbmError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        QbmError::InvalidArgument(msg.into())
    }
}
