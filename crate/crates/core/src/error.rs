use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("gauge fixing lost state identity between R = {r_lo:.6} and R = {r_hi:.6} (overlap {overlap:.3}); refine the grid")]
    Gauge { r_lo: f64, r_hi: f64, overlap: f64 },

    #[error("box too small: wavefunction {state} has edge amplitude {amplitude:.3e} at R = {r:.4}")]
    BoxTooSmall { state: usize, amplitude: f64, r: f64 },

    #[error("window error: {0}")]
    Window(String),

    #[error("problem dimension {dim} exceeds the configured cap {cap}")]
    TooLarge { dim: usize, cap: usize },

    #[error("not converged: {what} (drift {drift:.3e})")]
    NotConverged { what: String, drift: f64 },

    #[error("calibration did not converge after {evaluations} evaluations; best residuals {residuals:?}")]
    Calibration { evaluations: usize, residuals: Vec<f64> },

    #[error("singular: {0}")]
    Singular(String),

    #[error("diagnostic: {0}")]
    Diagnostic(String),

    #[error("ambiguous maximum at {candidates:?}")]
    Ambiguous { candidates: Vec<f64> },

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}
