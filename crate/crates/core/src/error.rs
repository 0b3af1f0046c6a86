use alloc::string::String;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A configuration value or a cross-field constraint is out of range.
    #[error("configuration error: {0}")]
    Config(String),
    /// A call-site argument does not satisfy the operation's precondition.
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("training error: {0}")]
    Training(String),
    /// The evaluation protocol cannot be run on the given labels.
    #[error("protocol error: {0}")]
    Protocol(String),
}

pub type Result<T> = core::result::Result<T, Error>;

macro_rules! config_err {
    ($($arg:tt)*) => { $crate::Error::Config(alloc::format!($($arg)*)) };
}

macro_rules! arg_err {
    ($($arg:tt)*) => { $crate::Error::Argument(alloc::format!($($arg)*)) };
}

pub(crate) use arg_err;
pub(crate) use config_err;
