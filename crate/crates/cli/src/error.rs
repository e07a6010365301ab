use qbm_core::QbmError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Model(QbmError),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<QbmError> for CliError {
    fn from(e: QbmError) -> Self {
        match e {
            QbmError::InvalidArgument(msg) => CliError::Config(msg),
            other => CliError::Model(other),
        }
    }
}

impl CliError {
    /// Process exit status: 2 configuration, 3 physics or model, 4 I/O.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model(_) => 3,
            CliError::Io(_) => 4,
        }
    }
}
