use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Core(#[from] sbm_core::Error),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("config: {0}")]
    Config(String),
    #[error("format: {0}")]
    Format(String),
}

impl CliError {
    /// 2 for domain errors, 3 for exceeded budgets, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        use sbm_core::Error as E;
        match self {
            CliError::Core(E::Budget(_) | E::SamplingFailure(_)) => 3,
            CliError::Core(E::Projection(_)) => 1,
            CliError::Core(_) | CliError::Config(_) => 2,
            _ => 1,
        }
    }
}
