use thiserror::Error;

/// Errors surfaced by the library.
///
/// `Input` covers malformed or inconsistent caller data (dimension
/// mismatches, non-CPTP channels, out-of-range parameters); `Numerical`
/// covers solver and eigensolver failures on well-formed input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("input error: {0}")]
    Input(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical(msg.into())
    }
}
