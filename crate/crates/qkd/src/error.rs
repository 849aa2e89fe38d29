use thiserror::Error;

/// Errors from session simulation and corpus handling.
#[derive(Debug, Error)]
pub enum QkdError {
    /// Failure bubbled up from the state simulator.
    #[error(transparent)]
    Quantum(#[from] quantum_core::QuantumError),

    /// A session or corpus configuration that cannot be simulated.
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed corpus file: {0}")]
    Malformed(String),

    #[error("csv failure: {0}")]
    Csv(#[from] csv::Error),

    #[error("metadata failure: {0}")]
    Json(#[from] serde_json::Error),
}
