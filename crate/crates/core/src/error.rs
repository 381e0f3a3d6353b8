use thiserror::Error;

/// Errors raised by the discretization, transcription and solver layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("point {value} lies outside [-1, 1]")]
    Domain { value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("Newton iteration for node {index} did not converge (residual {residual:e})")]
    NodeConvergence { index: usize, residual: f64 },

    #[error("quadrature weights fail exactness at degree {degree} (error {error:e})")]
    QuadratureExactness { degree: usize, error: f64 },

    #[error("singular linear system (condition estimate {condition:e})")]
    Singular { condition: f64 },

    #[error("non-finite value from {source_name} at node {index}")]
    NonFiniteEvaluation { source_name: String, index: usize },

    #[error("layout mismatch: expected {expected} entries, got {actual}")]
    Layout { expected: usize, actual: usize },

    #[error("non-finite objective or constraints at the current iterate")]
    NonFiniteIterate { chi: Vec<f64> },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NewtonDivergence { iterations: usize, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
