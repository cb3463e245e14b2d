use std::fmt;

/// Failure classes, mapped to process exit codes.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or parameter values (exit code 1).
    Usage(String),
    /// A computation could not be completed (exit code 2).
    Numerical(String),
    /// Reading config or writing output failed (exit code 2).
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numerical(_) | CliError::Io(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
            CliError::Io(m) => write!(f, "i/o failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<kicktop_core::Error> for CliError {
    fn from(e: kicktop_core::Error) -> Self {
        use kicktop_core::Error as E;
        match e {
            E::InvalidSpin(_) | E::InvalidParameter(_) | E::DimensionMismatch { .. } => {
                CliError::Usage(e.to_string())
            }
            E::Io(io) => CliError::Io(io.to_string()),
            other => CliError::Numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
