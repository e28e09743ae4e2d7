use num_complex::Complex64;
use thiserror::Error;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("branch cut of (±ix)^ε hit at x = {x}")]
    BranchCut { x: Complex64 },

    #[error("turning points are degenerate near x = {x}")]
    DegenerateTurningPoints { x: Complex64 },

    #[error("no turning points found for E = {energy}")]
    NoTurningPoints { energy: Complex64 },

    #[error("unsupported operation: {0}")]
    Unsupported(String),

    #[error("step size underflow at t = {t} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("trajectory did not escape before t_max = {t_max}")]
    NotEscaped { t_max: f64 },

    #[error("branch tracking failed: {0}")]
    BranchTracking(String),

    #[error("solution overflowed along the ray; reduce the ray radius ({radius})")]
    Overflow { radius: f64 },

    #[error("root search did not converge after {iterations} iterations (last E = {last}, residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        last: Complex64,
        residual: f64,
    },

    #[error("eigenvalue index {index} missing for {label}")]
    MissingIndex { index: usize, label: String },

    #[error("E = {energy} is not an eigenvalue (residual {residual:e})")]
    NotAnEigenvalue { energy: Complex64, residual: f64 },

    #[error("too few completed visits ({visits}) for a residence estimate")]
    LowConfidence { visits: usize },

    #[error("io: {0}")]
    Io(String),

    #[error("schema: {0}")]
    Schema(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
