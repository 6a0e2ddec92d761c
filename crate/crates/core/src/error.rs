use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// The two coherent components of a mode are too close for the
    /// orthogonal two-state basis to exist.
    #[error("degenerate superposition: |xi1 - xi2|^2 = {dist_sq:e} is below {threshold:e}")]
    DegenerateSuperposition { dist_sq: f64, threshold: f64 },

    #[error("time must be non-negative, got {0}")]
    NegativeTime(f64),

    #[error("decay rate must be non-negative and finite, got {0}")]
    InvalidRate(f64),

    #[error("amplitude component is not finite: {0}")]
    NonFiniteAmplitude(String),

    #[error("initial state has zero norm")]
    ZeroState,

    #[error("matrix is not Hermitian: max |M - M^dag| = {deviation:e}")]
    NotHermitian { deviation: f64 },

    #[error("invalid subsystem pair ({0}, {1})")]
    InvalidSubsystemPair(&'static str, &'static str),

    #[error("Fock cutoff {cutoff} too small: truncated tail {tail:e} exceeds {budget:e}")]
    CutoffTooSmall { cutoff: usize, tail: f64, budget: f64 },

    #[error("integration step {step:e} rejected: {reason}")]
    StepTooLarge { step: f64, reason: String },

    #[error("state leaked out of the two-qubit span: leakage {leakage:e} exceeds {budget:e}")]
    LeakageExceeded { leakage: f64, budget: f64 },

    #[error("invalid configuration field `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: &str, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.to_string(),
            message: message.into(),
        }
    }
}
