use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Malformed transcript record. `record` is the 1-based conversation
    /// index in the file, `line` the 1-based line where the record starts.
    #[error("record {record} (line {line}): {message}")]
    Parse {
        record: usize,
        line: usize,
        message: String,
    },

    /// A precondition on user-supplied data was violated.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A numeric routine failed to converge or produced an undefined result.
    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn numeric(msg: impl Into<String>) -> Self {
        Error::Numeric(msg.into())
    }
}
