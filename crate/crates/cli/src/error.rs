use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),

    #[error("{0}: {1}")]
    Io(String, String),

    #[error(transparent)]
    Core(#[from] nonlocal_core::Error),
}
