use thiserror::Error;

/// Errors raised by the evaluators, witnesses and experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("usage error: {0}")]
    Usage(String),
    #[error("size error: {0}")]
    Size(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("malformed input: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// Usage-class errors map to exit code 2 in the CLI.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::Usage(_)
                | Error::Parameter(_)
                | Error::Format(_)
                | Error::Json(_)
                | Error::Dimension(_)
                | Error::Size(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
