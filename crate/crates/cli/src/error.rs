use std::path::PathBuf;

use thiserror::Error;

pub const EXIT_FAILED: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_DOMAIN: u8 = 3;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },

    #[error("{what}: {source}")]
    Json { what: String, source: serde_json::Error },

    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Core(#[from] renyi_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) if e.is_domain() => EXIT_DOMAIN,
            _ => EXIT_INPUT,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
