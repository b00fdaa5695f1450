use alloc::string::String;
use core::fmt;

/// Errors raised by the library. The variants mirror the exit-code classes of
/// the command line front end.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A parameter is outside its domain (negative variance, bad budget, ...).
    Config(String),
    /// The request is well-formed but too large for an exhaustive routine.
    Capability(String),
    /// Input data is inconsistent (uncovered node, malformed record, ...).
    Data(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn capability(msg: impl Into<String>) -> Self {
        Error::Capability(msg.into())
    }

    pub(crate) fn data(msg: impl Into<String>) -> Self {
        Error::Data(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(m) => write!(f, "configuration error: {m}"),
            Error::Capability(m) => write!(f, "capability error: {m}"),
            Error::Data(m) => write!(f, "data error: {m}"),
        }
    }
}

impl core::error::Error for Error {}
