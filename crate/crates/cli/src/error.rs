use std::fmt;
use std::path::Path;

use vlrs::codec::CodecError;
use vlrs::format::{ContainerError, SpecError};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_IO: u8 = 3;

/// A failed command and the exit status it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad arguments or input that does not fit the code.
    Usage(String),
    /// The code, or the code a container was written with, is wrong.
    Validation(String),
    /// Unreadable files and damaged or truncated data.
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
            CliError::Io(_) => EXIT_IO,
        }
    }

    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Validation(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<SpecError> for CliError {
    fn from(e: SpecError) -> Self {
        CliError::Validation(e.to_string())
    }
}

impl From<ContainerError> for CliError {
    fn from(e: ContainerError) -> Self {
        match e {
            ContainerError::HashMismatch { .. } => CliError::Validation(e.to_string()),
            ContainerError::TerminationTooLong(_) => CliError::Usage(e.to_string()),
            _ => CliError::Io(e.to_string()),
        }
    }
}

impl From<CodecError> for CliError {
    fn from(e: CodecError) -> Self {
        match e {
            CodecError::Truncated { .. } | CodecError::Malformed { .. } | CodecError::AmbiguousTermination => {
                CliError::Io(e.to_string())
            }
            CodecError::UnknownSymbol { .. } | CodecError::NotSuffixConstrained => CliError::Usage(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}
