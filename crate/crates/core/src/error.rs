use thiserror::Error;

/// Errors raised by the numerical kernels and measures.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input violated an operation's preconditions (shape, hermiticity, trace).
    #[error("contract violation: {0}")]
    Contract(String),
    /// A parameter was outside its admissible domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A computation produced a value outside its numerical tolerance.
    #[error("numerical error: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

macro_rules! contract {
    ($($arg:tt)*) => { $crate::error::Error::Contract(format!($($arg)*)) };
}
macro_rules! domain {
    ($($arg:tt)*) => { $crate::error::Error::Domain(format!($($arg)*)) };
}
pub(crate) use contract;
pub(crate) use domain;
