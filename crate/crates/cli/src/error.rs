use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    Usage(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{0}")]
    Exhausted(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) | CliError::Usage(_) | CliError::Read { .. } => 2,
            CliError::Invalid(_) | CliError::Write { .. } => 3,
            CliError::Exhausted(_) => 5,
        }
    }
}

pub const OK: u8 = 0;
pub const INVALID: u8 = 3;
pub const NOT_POSITIVE: u8 = 4;
