use thiserror::Error;

#[derive(Debug, Error)]
pub enum HartError {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A kernel estimate had no effective weight at the evaluation point.
    #[error("estimation failed at (x = {x}, sigma = {sigma}): {reason}")]
    Estimation { x: f64, sigma: f64, reason: String },

    #[error("not enough data: {0}")]
    InsufficientData(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, HartError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(HartError::Domain(msg.into()))
}
