use thiserror::Error;

/// Errors raised by the library. Every variant names the offending input.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid {field}: {reason}")]
    Validation { field: String, reason: String },

    #[error("assumption {clause} violated: {detail}")]
    AssumptionViolated { clause: String, detail: String },

    #[error("path diverged at t={t} in replicate {replicate}")]
    SimulationDiverged { t: i64, replicate: usize },

    #[error("coefficient tail too heavy: truncation needs lag {required} (limit {limit})")]
    Truncation { required: usize, limit: usize },

    #[error("psi inversion diverges: coefficient sum {sum} >= 1")]
    Divergence { sum: f64 },

    #[error("quadrature did not reach tolerance near y={at}: estimated error {error:e}")]
    Quadrature { at: f64, error: f64 },

    #[error("internal consistency check '{check}' failed: relative error {rel_err:e}")]
    InternalConsistency { check: String, rel_err: f64 },

    #[error("chain enumeration for k={k} exceeds the limit {limit}")]
    CombinatorialLimit { k: usize, limit: usize },

    #[error("table with {cells} cells exceeds the limit {limit}")]
    EnumerationLimit { cells: usize, limit: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn validation(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
