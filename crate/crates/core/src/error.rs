use thiserror::Error;

/// Errors raised by the library. Every public entry point validates its
/// arguments and reports problems through this type rather than panicking.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("multiplexing gain {r} outside [0, {max}]")]
    OutOfRange { r: f64, max: f64 },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("unknown protocol `{0}`")]
    UnknownProtocol(String),
    #[error("unknown oracle case `{0}`")]
    UnknownCase(String),
    #[error("not enough usable points for a fit: {0}")]
    InsufficientData(String),
    #[error("io: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
