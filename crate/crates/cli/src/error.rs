use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] polaritonic::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("{0}")]
    Other(String),
}

impl CliError {
    /// 2 configuration, 3 convergence, 4 window or grid edge, 1 anything else.
    pub fn exit_code(&self) -> u8 {
        use polaritonic::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::Parameter(_) | E::Parse { .. }) => 2,
            CliError::Core(E::NotConverged { .. } | E::Calibration { .. } | E::Gauge { .. }) => 3,
            CliError::Core(E::Window(_) | E::BoxTooSmall { .. }) => 4,
            _ => 1,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Other(e.to_string())
    }
}
