use std::io;
use std::path::{Path, PathBuf};

/// Errors from the experiment harness, file formats and command line.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("capability error: {0}")]
    Capability(String),
    #[error("{}:{line}: {message}", path.display())]
    Parse { path: PathBuf, line: usize, message: String },
    #[error("I/O error on {}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
}

pub type Result<T> = std::result::Result<T, HarnessError>;

impl HarnessError {
    pub fn config(msg: impl Into<String>) -> Self {
        HarnessError::Config(msg.into())
    }

    pub fn io(path: &Path, source: io::Error) -> Self {
        HarnessError::Io { path: path.to_path_buf(), source }
    }

    pub fn parse(path: &Path, line: usize, message: impl Into<String>) -> Self {
        HarnessError::Parse { path: path.to_path_buf(), line, message: message.into() }
    }

    /// Process exit status: 2 for bad configuration or input, 3 for requests
    /// beyond an exhaustive routine's limits, 4 for I/O failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Parse { .. } => 2,
            HarnessError::Capability(_) => 3,
            HarnessError::Io { .. } => 4,
        }
    }
}

impl From<votecascade_core::Error> for HarnessError {
    fn from(e: votecascade_core::Error) -> Self {
        match e {
            votecascade_core::Error::Config(m) | votecascade_core::Error::Data(m) => HarnessError::Config(m),
            votecascade_core::Error::Capability(m) => HarnessError::Capability(m),
        }
    }
}
