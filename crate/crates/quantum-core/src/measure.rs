//! Projective measurement bases for single qubits.

use crate::matrix::ComplexMatrix;

/// The two measurement bases used by the protocols: the computational
/// (rectilinear) basis `{|0>, |1>}` and the diagonal basis `{|+>, |->}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MeasurementBasis {
    Computational,
    Diagonal,
}

impl MeasurementBasis {
    /// The rank-one projector onto `outcome` (0 or 1) in this basis.
    ///
    /// Outcome 0 denotes `|0>` or `|+>`, outcome 1 denotes `|1>` or `|->`.
    pub fn projector(&self, outcome: u8) -> ComplexMatrix {
        debug_assert!(outcome <= 1);
        let m = match (self, outcome) {
            (MeasurementBasis::Computational, 0) => [1.0, 0.0, 0.0, 0.0],
            (MeasurementBasis::Computational, _) => [0.0, 0.0, 0.0, 1.0],
            (MeasurementBasis::Diagonal, 0) => [0.5, 0.5, 0.5, 0.5],
            (MeasurementBasis::Diagonal, _) => [0.5, -0.5, -0.5, 0.5],
        };
        ComplexMatrix::from_real(2, &m).expect("2x2")
    }
}
