use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid arguments or inputs that violate an operation's preconditions.
    #[error("usage error: {0}")]
    Usage(String),
    /// A malformed cell in a delimited input file. Rows and columns are 1-based.
    #[error("parse error at row {row}, column {column}: {message}")]
    Parse { row: usize, column: usize, message: String },
    #[error("out of memory: could not allocate {bytes} bytes for {what}")]
    OutOfMemory { what: &'static str, bytes: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn usage<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Usage(msg.into()))
}
