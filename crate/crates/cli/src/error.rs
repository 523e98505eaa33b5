use std::path::PathBuf;

use thiserror::Error;

/// Problems with the configuration or flags; exit code 1.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("config line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing {section}.{key}")]
    Missing { section: String, key: String },
    #[error("invalid {section}.{key} = {value:?}: expected {expected}")]
    Invalid { section: String, key: String, value: String, expected: String },
    #[error("{field}: {message}")]
    Scenario { field: String, message: String },
    #[error("unknown preset {id:?}; valid presets: {valid}")]
    UnknownPreset { id: String, valid: String },
}

impl ConfigError {
    pub fn invalid(section: &str, key: &str, value: &str, expected: &str) -> Self {
        Self::Invalid {
            section: section.into(),
            key: key.into(),
            value: value.into(),
            expected: expected.into(),
        }
    }

    pub fn scenario(field: &str, message: impl ToString) -> Self {
        Self::Scenario { field: field.into(), message: message.to_string() }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } => 1,
            CliError::Numerical(_) => 2,
        }
    }
}
