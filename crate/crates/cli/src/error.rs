use std::fmt;

use betascale_core::Error as CoreError;

#[derive(Debug)]
pub enum CliError {
    Core(CoreError),
    /// Unreadable or malformed input files.
    Input(String),
    Io(std::io::Error),
    /// Bad flag combinations that clap cannot express.
    Usage(String),
    /// `--check` found a difference.
    Mismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(e) if e.is_numeric() => 2,
            CliError::Usage(_) => 64,
            _ => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Input(m) => write!(f, "input: {m}"),
            CliError::Io(e) => write!(f, "io: {e}"),
            CliError::Usage(m) => write!(f, "usage: {m}"),
            CliError::Mismatch(m) => write!(f, "check failed: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;
