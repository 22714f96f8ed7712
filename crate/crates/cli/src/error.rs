use std::fmt;

use densparam::Error;

pub const EXIT_OK: u8 = 0;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_NOT_STATE: u8 = 4;
pub const EXIT_MISMATCH: u8 = 5;

/// Failure of a subcommand, carrying its process exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INPUT,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }

    pub fn mismatch(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_MISMATCH,
            message: message.into(),
        }
    }

    /// Maps a library error, prefixing the message with the input field it
    /// concerns.
    pub fn from_lib(field: &str, err: Error) -> Self {
        let message = if field.is_empty() {
            err.to_string()
        } else {
            format!("{field}: {err}")
        };
        match err {
            Error::NotPsd { .. }
            | Error::ConvergenceFailure
            | Error::NonFinite
            | Error::SingularAngle { .. } => Self::numerical(message),
            _ => Self::input(message),
        }
    }

    pub fn io(path: &str, err: std::io::Error) -> Self {
        Self::input(format!("{path}: {err}"))
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for CliError {}

pub type CliResult<T> = std::result::Result<T, CliError>;
