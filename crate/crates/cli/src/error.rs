use std::path::PathBuf;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Domain(String),
}

impl CliError {
    /// 2 for usage and configuration problems, 3 for domain errors.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Domain(_) => 3,
            _ => 2,
        }
    }
}
