use thiserror::Error;

/// Errors surfaced by state construction, validation, and evolution.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuantumError {
    /// A noise strength outside the physical range `[0, 1]`.
    #[error("noise strength must lie in [0, 1], got {0}")]
    InvalidStrength(f64),

    /// An operator or state vector whose dimension does not fit the register.
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    /// A qubit index addressed outside the register.
    #[error("qubit index {index} out of range for a {qubits}-qubit register")]
    QubitOutOfRange { index: usize, qubits: usize },

    /// Gate arity and target list disagree.
    #[error("gate acts on {gate_qubits} qubit(s) but {targets} target(s) were supplied")]
    TargetCountMismatch { gate_qubits: usize, targets: usize },

    /// A two-qubit gate addressed with the same qubit twice.
    #[error("control and target qubits must differ")]
    IdenticalTargets,

    /// Attempted to collapse a state onto an outcome of (numerically) zero
    /// probability.
    #[error("cannot collapse onto an outcome of probability {probability:e}")]
    ImpossibleOutcome { probability: f64 },

    /// A matrix that fails one of the density-matrix invariants.
    #[error("not a valid density matrix: {property} violated by {deviation:e}")]
    InvalidState {
        property: &'static str,
        deviation: f64,
    },
}
