use thiserror::Error;

/// Every failure the library reports.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("resource error: {0}")]
    Resource(String),
    #[error("argument error: {0}")]
    Argument(String),
    #[error("post-selection failed: outcome has probability {probability:e}")]
    PostSelection { probability: f64 },
    #[error("address error: address {addr} outside [0, {size})")]
    Address { addr: i64, size: usize },
    #[error("policy error: {0}")]
    Policy(String),
    #[error("state error: {0}")]
    State(String),
    #[error("configuration error: {0}")]
    Configuration(String),
    #[error("{line}:{col}: {message}")]
    Parse { line: usize, col: usize, message: String },
    #[error("row {row}, field `{field}`: {message}")]
    Dataset { row: usize, field: String, message: String },
    #[error("runtime error: {0}")]
    Runtime(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
