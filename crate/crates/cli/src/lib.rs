//! Batch front-end for `lindblad-cl`: configuration, file formats and the
//! subcommands behind the `lindblad-cl` binary.

pub mod commands;
pub mod config;
pub mod output;

pub use config::{ConfigFile, Purpose, RunConfig};

/// Environment variable capping scan parallelism.
pub const THREADS_ENV: &str = "LINDBLAD_CL_THREADS";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error at {key}: {message}")]
    Config { key: String, message: String },
    #[error("usage error: {0}")]
    Usage(String),
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    /// A physics or numerical failure; the message starts with the error name.
    #[error("{0}")]
    Physics(String),
    #[error("{0}")]
    ChecksFailed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Physics(_) | CliError::ChecksFailed(_) => 1,
            CliError::Config { .. } | CliError::Usage(_) | CliError::Io { .. } => 2,
        }
    }

    pub fn physics(e: impl std::fmt::Display) -> Self {
        CliError::Physics(e.to_string())
    }
}

/// Worker count from `LINDBLAD_CL_THREADS`, if set.
pub fn threads_from_env() -> Result<Option<usize>, CliError> {
    match std::env::var(THREADS_ENV) {
        Err(std::env::VarError::NotPresent) => Ok(None),
        Err(_) => Err(CliError::Config {
            key: THREADS_ENV.into(),
            message: "must be a positive integer".into(),
        }),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(CliError::Config {
                key: THREADS_ENV.into(),
                message: format!("must be a positive integer, found \"{v}\""),
            }),
        },
    }
}
