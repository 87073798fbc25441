use std::fmt;

use realign_core::Error;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    /// Argument error already rendered by the parser.
    Parse,
    Core(Error),
    Io(String),
    /// A recomputed quantity disagrees with its expected value.
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Parse | CliError::Io(_) => 1,
            CliError::Core(e) => match e {
                Error::InvalidParameter(_) | Error::UnresolvedSymbol(_) => 1,
                Error::CapExceeded { .. } => 2,
                Error::Degenerate(_) | Error::DynamicRange(_) | Error::Violation { .. } => 3,
                Error::SerTargetUnmet { .. } => 4,
            },
            CliError::Mismatch(_) => 5,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Parse => f.write_str("invalid arguments"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(m) => write!(f, "i/o: {m}"),
            CliError::Mismatch(m) => write!(f, "mismatch: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}
