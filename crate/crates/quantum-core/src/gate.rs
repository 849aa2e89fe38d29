//! The small unitary vocabulary needed by the key-distribution protocols:
//! identity, bit flip, Hadamard, and controlled-NOT.

use crate::matrix::{cx, ComplexMatrix};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Which unitary a [`Gate`] applies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum GateKind {
    I,
    X,
    H,
    Cnot,
}

/// A named unitary together with its canonical matrix.
///
/// Single-qubit gates store their 2x2 matrix; `Cnot` stores the 4x4 matrix
/// for control on qubit 0 and target on qubit 1 (qubit 0 being the left
/// tensor factor). Applying `Cnot` with the reversed target order permutes
/// the matrix accordingly at application time.
#[derive(Clone, Debug, PartialEq)]
pub struct Gate {
    kind: GateKind,
    matrix: ComplexMatrix,
}

impl Gate {
    pub fn i() -> Self {
        Gate {
            kind: GateKind::I,
            matrix: ComplexMatrix::identity(2),
        }
    }

    /// Pauli-X (bit flip).
    pub fn x() -> Self {
        Gate {
            kind: GateKind::X,
            matrix: ComplexMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).expect("2x2"),
        }
    }

    /// Hadamard, mapping the computational basis onto the diagonal basis.
    pub fn h() -> Self {
        let s = FRAC_1_SQRT_2;
        Gate {
            kind: GateKind::H,
            matrix: ComplexMatrix::from_real(2, &[s, s, s, -s]).expect("2x2"),
        }
    }

    /// Controlled-NOT with control on qubit 0 and target on qubit 1.
    pub fn cnot() -> Self {
        Gate {
            kind: GateKind::Cnot,
            matrix: cnot_matrix(0, 1),
        }
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    /// Number of qubits the gate acts on.
    pub fn qubit_count(&self) -> usize {
        match self.kind {
            GateKind::I | GateKind::X | GateKind::H => 1,
            GateKind::Cnot => 2,
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    /// Largest entrywise deviation of `U U^dagger` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        let u = &self.matrix;
        u.mul(&u.adjoint())
            .max_abs_diff(&ComplexMatrix::identity(u.dim()))
    }
}

/// The 4x4 controlled-NOT for an arbitrary (control, target) assignment in
/// a two-qubit register. Qubit 0 occupies the high-order index bit.
pub(crate) fn cnot_matrix(control: usize, target: usize) -> ComplexMatrix {
    debug_assert!(control < 2 && target < 2 && control != target);
    let mut m = ComplexMatrix::zeros(4);
    for col in 0..4usize {
        let mut bits = [(col >> 1) & 1, col & 1];
        if bits[control] == 1 {
            bits[target] ^= 1;
        }
        let row = (bits[0] << 1) | bits[1];
        m.set(row, col, cx(1.0, 0.0));
    }
    m
}
