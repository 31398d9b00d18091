use thiserror::Error;

/// Errors produced by the analysis, cloner and simulation layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QkdError {
    #[error("{what} index {index} out of range 0..{bound}")]
    IndexOutOfRange {
        what: &'static str,
        index: usize,
        bound: usize,
    },

    #[error("dimension {0} is too small (need at least 2)")]
    DimensionTooSmall(usize),

    #[error("subsystem factors {factors:?} are inconsistent with dimension {dim}")]
    InvalidFactors { factors: Vec<usize>, dim: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("cloner amplitudes are not normalized (sum |a|^2 = {0})")]
    AmplitudesNotNormalized(f64),

    #[error("operation requires y = z (got y = {y}, z = {z})")]
    AsymmetricParams { y: f64, z: f64 },

    #[error("invalid probability vector: {0}")]
    InvalidDistribution(String),

    #[error("fidelity {0} outside the admissible range")]
    FidelityOutOfRange(f64),

    #[error("{0} is not a valid density matrix")]
    InvalidDensityMatrix(String),

    #[error("consistency check failed for {what}: deviation {deviation:e}")]
    ConsistencyCheck { what: &'static str, deviation: f64 },

    #[error("no crossing of Bob's and Eve's information for F_A in [{lo}, {hi}]")]
    NoCrossing { lo: f64, hi: f64 },

    #[error("{what} did not converge after {iterations} iterations")]
    NonConvergence { what: &'static str, iterations: usize },

    #[error("preset {preset} is not supported by {operation}")]
    UnsupportedPreset {
        preset: String,
        operation: &'static str,
    },

    #[error("unknown preset '{0}'")]
    UnknownPreset(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no rounds survived sifting; error rate is undefined")]
    NoSiftedRounds,

    #[error("insufficient rounds: {got} < {need}")]
    InsufficientRounds { got: u64, need: u64 },

    #[error("i/o error: {0}")]
    Io(String),
}

impl QkdError {
    /// True for failures of an iterative numerical method (CLI exit code 2).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            QkdError::NonConvergence { .. } | QkdError::NoCrossing { .. }
        )
    }
}

impl From<std::io::Error> for QkdError {
    fn from(e: std::io::Error) -> Self {
        QkdError::Io(e.to_string())
    }
}

impl From<csv::Error> for QkdError {
    fn from(e: csv::Error) -> Self {
        QkdError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, QkdError>;
