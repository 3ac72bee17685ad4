use std::path::PathBuf;

use thiserror::Error;

/// Process exit codes.
pub mod code {
    pub const OK: u8 = 0;
    pub const FAILED: u8 = 1;
    pub const NO_HALT: u8 = 2;
    pub const EXPLODED: u8 = 3;
    pub const USAGE: u8 = 64;
    pub const BAD_INPUT: u8 = 65;
    pub const IO: u8 = 74;
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {msg}", path.display())]
    Input { path: PathBuf, msg: String },
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    BadInput(String),
    #[error("{0}")]
    Exploded(String),
    #[error("{0}")]
    Undefined(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => code::USAGE,
            CliError::Input { .. } | CliError::BadInput(_) => code::BAD_INPUT,
            CliError::Io { .. } => code::IO,
            CliError::Exploded(_) => code::EXPLODED,
            CliError::Undefined(_) => code::NO_HALT,
        }
    }
}
