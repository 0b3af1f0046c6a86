use std::io;
use std::path::{Path, PathBuf};

/// Errors from file handling and the batch commands.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),
    #[error("data error: {0}")]
    Data(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {msg}")]
    Format { path: PathBuf, msg: String },
    #[error(transparent)]
    Core(#[from] tfhog_core::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn io(path: &Path, source: io::Error) -> Self {
        Self::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    pub fn format(path: &Path, msg: impl Into<String>) -> Self {
        Self::Format {
            path: path.to_path_buf(),
            msg: msg.into(),
        }
    }

    /// Process exit status: 2 for configuration, 3 for input data, 4 for
    /// failures that indicate a bug or a violated internal invariant.
    pub fn exit_code(&self) -> i32 {
        use tfhog_core::Error as Core;
        match self {
            Self::Config(_) | Self::Core(Core::Config(_)) => 2,
            Self::Data(_)
            | Self::Io { .. }
            | Self::Format { .. }
            | Self::Core(Core::Protocol(_)) => 3,
            Self::Core(Core::Argument(_) | Core::Training(_)) => 4,
        }
    }
}
