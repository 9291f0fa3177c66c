use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("filter error: {0}")]
    Filter(rpmbm::Error),
}

impl From<rpmbm::Error> for CliError {
    fn from(e: rpmbm::Error) -> Self {
        match e {
            rpmbm::Error::Config(msg) => CliError::Config(msg),
            other => CliError::Filter(other),
        }
    }
}

impl CliError {
    /// 2 for configuration problems, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
