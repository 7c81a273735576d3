use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum Error {
    /// Malformed input data, reported with the 1-based source line.
    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    /// A precondition on arguments or data was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Tensor or layer dimensions do not line up.
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    /// A numeric failure such as a NaN gradient or diverged loss.
    #[error("numeric failure: {0}")]
    Numeric(String),

    /// A checkpoint or data file could not be decoded.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn parse(line: u64, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: message.into(),
        }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidInput(message.into())
    }

    pub fn shape(message: impl Into<String>) -> Self {
        Error::ShapeMismatch(message.into())
    }
}
