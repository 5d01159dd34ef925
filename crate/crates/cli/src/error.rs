use std::path::PathBuf;

use ratchet_core::RatchetError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad configuration; `field` is the dotted config key at fault.
    #[error("invalid config: `{field}`: {reason}")]
    Config { field: String, reason: String },

    #[error(transparent)]
    Model(#[from] RatchetError),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

impl CliError {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        CliError::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    /// Parameter errors raised while building inputs are config errors,
    /// reported under `section.field`.
    pub fn from_input(section: &str, err: RatchetError) -> Self {
        match err {
            RatchetError::InvalidParameter { field, reason } => {
                CliError::config(format!("{section}.{field}"), reason)
            }
            other => CliError::Model(other),
        }
    }

    /// 1 for configuration problems, 2 for everything raised while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 1,
            CliError::Model(_) | CliError::Io { .. } => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
