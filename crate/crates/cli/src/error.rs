use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] chomp_core::Error),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0} rows disagree with the engine")]
    Disagreement(usize),
    #[error("engine lost {0} games from a winning seat")]
    EngineLost(usize),
    #[error("{0}")]
    Usage(String),
    #[error("http: {0}")]
    Http(String),
}

impl CliError {
    /// Process exit status: 2 for unparsable input, 3 when the engine ran out of budget.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Core(chomp_core::Error::Parse { .. } | chomp_core::Error::InvalidComplex(_)) => 2,
            CliError::Core(e) if e.is_resource_exceeded() => 3,
            CliError::Usage(_) => 2,
            _ => 1,
        }
    }
}

impl From<reqwest::Error> for CliError {
    fn from(e: reqwest::Error) -> Self {
        CliError::Http(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
