use copreg_core::Error;
use std::fmt;

/// Failure of a command, carrying its exit code.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config keys or input schema: exit 2.
    Usage(String),
    /// Exit 3.
    Io(String),
    /// Convergence or other numerical failure: exit 4.
    Numeric(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numeric(_) => 4,
        }
    }

    pub fn io(path: &std::path::Path, e: impl fmt::Display) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Numeric(m) => f.write_str(m),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Convergence { .. }
            | Error::Underflow { .. }
            | Error::Divergence { .. }
            | Error::Numeric(_)
            | Error::IllConditioned(_) => CliError::Numeric(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
