use thiserror::Error;

/// Error type shared by every module in the crate.
///
/// `Config` covers bad hyperparameters and shape/dimension mismatches,
/// `Format` covers malformed input data, `Io` wraps filesystem failures.
/// The CLI maps each variant to a distinct exit code.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("data format error: {0}")]
    Format(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}
