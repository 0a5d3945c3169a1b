use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Library(#[from] mzvfq::Error),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl CliError {
    /// 2 for anything the caller typed wrong, 1 for failures while computing.
    pub fn exit_code(&self) -> u8 {
        use mzvfq::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io { .. } | CliError::Json(_) => 2,
            CliError::Library(E::Parse { .. } | E::InvalidField(_) | E::InvalidPlace(_) | E::Invalid(_)) => 2,
            CliError::Library(_) => 1,
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
