use thiserror::Error;

pub type Result<T> = std::result::Result<T, CasimirError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CasimirError {
    /// An argument lies outside the domain of a function.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid polarizability model: {0}")]
    InvalidModel(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid quadrature configuration: {0}")]
    InvalidConfig(String),

    /// The operation needs a spectral density the model does not have.
    #[error("{operation} requires a spectral density; the {kind} model has none")]
    ModelKind {
        operation: &'static str,
        kind: &'static str,
    },

    /// An adaptive integral exhausted its subdivision budget.
    #[error(
        "integral `{stage}` did not converge: value {value:e}, error estimate {error_estimate:e}"
    )]
    NotConverged {
        stage: String,
        value: f64,
        error_estimate: f64,
    },
}

impl CasimirError {
    pub fn not_converged(stage: impl Into<String>, value: f64, error_estimate: f64) -> Self {
        CasimirError::NotConverged {
            stage: stage.into(),
            value,
            error_estimate,
        }
    }

    pub fn is_convergence_failure(&self) -> bool {
        matches!(self, CasimirError::NotConverged { .. })
    }
}
