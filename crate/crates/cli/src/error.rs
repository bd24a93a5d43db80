//! CLI error taxonomy and the exit-code contract.
//!
//! Exit codes are stable across commands: `0` success, `1` I/O trouble
//! (missing, unreadable, or malformed files), `2` contract violations
//! (bad ε, invalid ranges, unsupported operations). Argument-syntax errors
//! exit with clap's own code, which is also 2.

use std::fmt;

#[derive(Debug)]
pub enum CliError {
    /// Filesystem failures.
    Io(std::io::Error),
    /// Malformed data files (curve/graph/bundle contents).
    Data(String),
    /// Violated preconditions: bad ε, impossible ranges, wrong space.
    Usage(String),
    /// Library-level errors, classified by their variant.
    Core(pfre_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) | CliError::Data(_) => 1,
            // Parse errors carry line-numbered diagnostics for a data file.
            CliError::Core(pfre_core::Error::Parse { .. }) => 1,
            CliError::Usage(_) | CliError::Core(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Data(m) | CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl From<pfre_core::Error> for CliError {
    fn from(e: pfre_core::Error) -> Self {
        CliError::Core(e)
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
