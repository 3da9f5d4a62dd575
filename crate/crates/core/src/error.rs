use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Geometry, basis or configuration values that violate their invariants.
    #[error("configuration error: {0}")]
    Config(String),

    /// Argument outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    /// Non-finite values appeared in the flux or the state.
    #[error("blow-up at t = {t}: max |u| = {max_abs}")]
    BlowUp { t: f64, max_abs: f64 },

    /// The adaptive controller asked for a step below `dt_min`.
    #[error("step size underflow at t = {t}: dt = {dt} < dt_min = {dt_min}")]
    Stiffness { t: f64, dt: f64, dt_min: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("initial support radius {radius} exceeds r0 + tol_r = {limit}")]
    InconsistentInitialSupport { radius: f64, limit: f64 },

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Short machine-readable tag used in structured error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Config(_) => "config",
            Error::Domain(_) => "domain",
            Error::Numeric(_) => "numeric",
            Error::BlowUp { .. } => "blow_up",
            Error::Stiffness { .. } => "stiffness",
            Error::InsufficientData(_) => "insufficient_data",
            Error::InconsistentInitialSupport { .. } => "inconsistent_initial_support",
            Error::DegenerateInput(_) => "degenerate_input",
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
        }
    }
}
