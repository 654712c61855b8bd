//! Library side of the `slabtherm` command-line tool.

pub mod commands;
pub mod config;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Compute(#[from] slabtherm::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{failed} of {total} sweep rows failed")]
    RowsFailed { failed: usize, total: usize },
}

impl CliError {
    /// 2 for bad input, 3 for a failed computation, 4 for a partially failed sweep.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Compute(slabtherm::Error::InvalidInput { .. }) => 2,
            CliError::Compute(_) => 3,
            CliError::RowsFailed { .. } => 4,
        }
    }
}

/// Reads and layers config files; later files override earlier ones.
pub fn load_configs(paths: &[std::path::PathBuf]) -> Result<config::RawConfig, CliError> {
    let mut raw = config::RawConfig::default();
    for path in paths {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        raw.merge(config::RawConfig::parse(&text)?);
    }
    Ok(raw)
}
