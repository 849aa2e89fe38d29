//! Density-matrix simulation of small qubit registers under noise.
//!
//! This crate is the physics substrate for the key-distribution laboratory:
//! one- and two-qubit states evolve as density matrices under
//!
//! * unitary gates (identity, Pauli-X, Hadamard, controlled-NOT),
//! * parameterised noise channels in operator-sum (Kraus) form — bit flip,
//!   amplitude damping, and depolarizing,
//! * projective measurements in the computational or diagonal basis, with
//!   explicit post-measurement collapse for sequential measurements on
//!   entangled registers.
//!
//! Everything is dense and small (2x2 and 4x4 matrices), so the numerics
//! are deliberately simple: naive products, Kronecker embedding of
//! single-qubit operators, and a Jacobi eigensolver for the positivity
//! check. States constructed through [`DensityMatrix::from_matrix`] are
//! validated for Hermiticity, unit trace, and positive semidefiniteness;
//! the tolerances live alongside [`DensityMatrix`].

mod channel;
mod error;
mod gate;
mod matrix;
mod measure;
mod state;

pub use channel::{KrausChannel, NoiseKind};
pub use error::QuantumError;
pub use gate::{Gate, GateKind};
pub use matrix::{cx, ComplexMatrix};
pub use measure::MeasurementBasis;
pub use state::{
    DensityMatrix, EIGENVALUE_FLOOR, HERMITICITY_TOLERANCE, MIN_COLLAPSE_PROBABILITY,
    TRACE_TOLERANCE,
};

pub use num_complex::Complex64;
