//! Density matrices for one- and two-qubit registers.
//!
//! Qubit 0 is the **left** tensor factor, i.e. it owns the high-order bit of
//! the computational-basis index: for a two-qubit register the basis is
//! ordered `|00>, |01>, |10>, |11>` with qubit 0 first.

use num_complex::Complex64;

use crate::channel::KrausChannel;
use crate::error::QuantumError;
use crate::gate::{cnot_matrix, Gate, GateKind};
use crate::matrix::{cx, ComplexMatrix};
use crate::measure::MeasurementBasis;

/// Largest tolerated entrywise deviation from `rho = rho^dagger`.
pub const HERMITICITY_TOLERANCE: f64 = 1e-12;
/// Largest tolerated deviation of `Tr(rho)` from one.
pub const TRACE_TOLERANCE: f64 = 1e-12;
/// Eigenvalues may dip this far below zero before a state is rejected;
/// rounding in repeated channel applications makes exact non-negativity
/// too strict.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;
/// Outcomes with probability below this cannot be collapsed onto.
pub const MIN_COLLAPSE_PROBABILITY: f64 = 1e-15;

/// A validated density matrix over one or two qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl DensityMatrix {
    /// The pure state `|0...0><0...0|` on `num_qubits` qubits.
    pub fn zero_state(num_qubits: usize) -> Self {
        assert!(
            (1..=2).contains(&num_qubits),
            "register size must be 1 or 2 qubits"
        );
        let mut matrix = ComplexMatrix::zeros(1 << num_qubits);
        matrix.set(0, 0, cx(1.0, 0.0));
        DensityMatrix { matrix }
    }

    /// The projector `|psi><psi|` for a state vector given by its
    /// computational-basis amplitudes (length 2 or 4). The vector is
    /// normalised; an all-zero vector is rejected.
    pub fn pure(amplitudes: &[Complex64]) -> Result<Self, QuantumError> {
        let dim = amplitudes.len();
        if dim != 2 && dim != 4 {
            return Err(QuantumError::DimensionMismatch {
                expected: 2,
                actual: dim,
            });
        }
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if norm_sq < 1e-300 {
            return Err(QuantumError::InvalidState {
                property: "unit-trace",
                deviation: 1.0,
            });
        }
        let mut matrix = ComplexMatrix::zeros(dim);
        for r in 0..dim {
            for c in 0..dim {
                matrix.set(r, c, amplitudes[r] * amplitudes[c].conj() / norm_sq);
            }
        }
        Ok(DensityMatrix { matrix })
    }

    /// Wraps an arbitrary matrix after checking all density-matrix
    /// invariants (Hermiticity, unit trace, positive semidefiniteness).
    pub fn from_matrix(matrix: ComplexMatrix) -> Result<Self, QuantumError> {
        let dim = matrix.dim();
        if dim != 2 && dim != 4 {
            return Err(QuantumError::DimensionMismatch {
                expected: 2,
                actual: dim,
            });
        }
        let state = DensityMatrix { matrix };
        state.validate()?;
        Ok(state)
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn num_qubits(&self) -> usize {
        if self.dim() == 2 {
            1
        } else {
            2
        }
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.matrix.get(row, col)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }

    /// Checks the three density-matrix invariants:
    ///
    /// * Hermitian within [`HERMITICITY_TOLERANCE`],
    /// * unit trace within [`TRACE_TOLERANCE`],
    /// * eigenvalues no lower than [`EIGENVALUE_FLOOR`].
    pub fn validate(&self) -> Result<(), QuantumError> {
        let herm = self.matrix.hermiticity_defect();
        if herm > HERMITICITY_TOLERANCE {
            return Err(QuantumError::InvalidState {
                property: "hermiticity",
                deviation: herm,
            });
        }
        let tr = self.matrix.trace();
        let tr_dev = (tr - cx(1.0, 0.0)).norm();
        if tr_dev > TRACE_TOLERANCE {
            return Err(QuantumError::InvalidState {
                property: "unit-trace",
                deviation: tr_dev,
            });
        }
        let lowest = self
            .matrix
            .hermitian_eigenvalues()
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        if lowest < EIGENVALUE_FLOOR {
            return Err(QuantumError::InvalidState {
                property: "positive-semidefiniteness",
                deviation: -lowest,
            });
        }
        Ok(())
    }

    /// Conjugates the state by a gate: `rho -> U rho U^dagger`.
    ///
    /// Single-qubit gates take one target index; `Cnot` takes
    /// `[control, target]` (either order of the two qubits).
    pub fn apply_gate(&self, gate: &Gate, targets: &[usize]) -> Result<Self, QuantumError> {
        if gate.qubit_count() != targets.len() {
            return Err(QuantumError::TargetCountMismatch {
                gate_qubits: gate.qubit_count(),
                targets: targets.len(),
            });
        }
        let unitary = match gate.kind() {
            GateKind::I | GateKind::X | GateKind::H => {
                self.embed_single(gate.matrix(), targets[0])?
            }
            GateKind::Cnot => {
                let (control, target) = (targets[0], targets[1]);
                for &index in targets {
                    if index >= self.num_qubits() {
                        return Err(QuantumError::QubitOutOfRange {
                            index,
                            qubits: self.num_qubits(),
                        });
                    }
                }
                if control == target {
                    return Err(QuantumError::IdenticalTargets);
                }
                cnot_matrix(control, target)
            }
        };
        Ok(DensityMatrix {
            matrix: unitary.mul(&self.matrix).mul(&unitary.adjoint()),
        })
    }

    /// Applies a noise channel to one qubit of the register:
    /// `rho -> sum_k E_k rho E_k^dagger` with each `E_k` embedded as
    /// `E (x) I` or `I (x) E` according to `target`.
    pub fn apply_channel(
        &self,
        channel: &KrausChannel,
        target: usize,
    ) -> Result<Self, QuantumError> {
        let mut out = ComplexMatrix::zeros(self.dim());
        for op in channel.operators() {
            let embedded = self.embed_single(op, target)?;
            out = out.add(&embedded.mul(&self.matrix).mul(&embedded.adjoint()));
        }
        Ok(DensityMatrix { matrix: out })
    }

    /// Outcome probabilities `(p0, p1)` for measuring `target` in `basis`.
    ///
    /// `p_o = Tr(P_o rho)` with the projector embedded on the target qubit;
    /// the two values sum to one up to rounding. The state is unchanged.
    pub fn measure_probs(
        &self,
        basis: MeasurementBasis,
        target: usize,
    ) -> Result<(f64, f64), QuantumError> {
        let p0 = self.embed_single(&basis.projector(0), target)?;
        let p1 = self.embed_single(&basis.projector(1), target)?;
        Ok((
            p0.mul(&self.matrix).trace().re,
            p1.mul(&self.matrix).trace().re,
        ))
    }

    /// Projects the register onto `outcome` for `target` measured in
    /// `basis` and renormalises: `rho -> P rho P / Tr(P rho)`.
    ///
    /// Fails if the outcome has (numerically) zero probability, since the
    /// post-measurement state would be undefined.
    pub fn collapse(
        &self,
        basis: MeasurementBasis,
        target: usize,
        outcome: u8,
    ) -> Result<Self, QuantumError> {
        let projector = self.embed_single(&basis.projector(outcome), target)?;
        let projected = projector.mul(&self.matrix).mul(&projector);
        let probability = projected.trace().re;
        if probability < MIN_COLLAPSE_PROBABILITY {
            return Err(QuantumError::ImpossibleOutcome { probability });
        }
        Ok(DensityMatrix {
            matrix: projected.scale(1.0 / probability),
        })
    }

    /// Lifts a single-qubit operator onto this register: identity on every
    /// qubit except `target`.
    fn embed_single(
        &self,
        op: &ComplexMatrix,
        target: usize,
    ) -> Result<ComplexMatrix, QuantumError> {
        if op.dim() != 2 {
            return Err(QuantumError::DimensionMismatch {
                expected: 2,
                actual: op.dim(),
            });
        }
        let qubits = self.num_qubits();
        if target >= qubits {
            return Err(QuantumError::QubitOutOfRange {
                index: target,
                qubits,
            });
        }
        Ok(match (qubits, target) {
            (1, _) => op.clone(),
            (2, 0) => op.kron(&ComplexMatrix::identity(2)),
            _ => ComplexMatrix::identity(2).kron(op),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::NoiseKind;

    #[test]
    fn zero_state_is_valid_and_pure() {
        for qubits in [1, 2] {
            let rho = DensityMatrix::zero_state(qubits);
            rho.validate().unwrap();
            assert_eq!(rho.entry(0, 0), cx(1.0, 0.0));
            assert_eq!(rho.num_qubits(), qubits);
        }
    }

    #[test]
    fn pure_state_normalises_amplitudes() {
        // (2, 0) normalises to |0>.
        let rho = DensityMatrix::pure(&[cx(2.0, 0.0), cx(0.0, 0.0)]).unwrap();
        assert!((rho.entry(0, 0) - cx(1.0, 0.0)).norm() < 1e-15);
        rho.validate().unwrap();
    }

    #[test]
    fn x_gate_flips_the_zero_state() {
        let rho = DensityMatrix::zero_state(1)
            .apply_gate(&Gate::x(), &[0])
            .unwrap();
        assert!((rho.entry(1, 1) - cx(1.0, 0.0)).norm() < 1e-15);
        assert!(rho.entry(0, 0).norm() < 1e-15);
    }

    #[test]
    fn hadamard_prepares_equal_superposition() {
        let rho = DensityMatrix::zero_state(1)
            .apply_gate(&Gate::h(), &[0])
            .unwrap();
        for r in 0..2 {
            for c in 0..2 {
                assert!((rho.entry(r, c) - cx(0.5, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn bell_pair_has_perfect_correlations() {
        let rho = DensityMatrix::zero_state(2)
            .apply_gate(&Gate::h(), &[0])
            .unwrap()
            .apply_gate(&Gate::cnot(), &[0, 1])
            .unwrap();
        rho.validate().unwrap();
        // (|00> + |11>)/sqrt(2): only corners of the matrix are 1/2.
        assert!((rho.entry(0, 0) - cx(0.5, 0.0)).norm() < 1e-15);
        assert!((rho.entry(0, 3) - cx(0.5, 0.0)).norm() < 1e-15);
        assert!((rho.entry(3, 0) - cx(0.5, 0.0)).norm() < 1e-15);
        assert!((rho.entry(3, 3) - cx(0.5, 0.0)).norm() < 1e-15);
        assert!(rho.entry(1, 1).norm() < 1e-15);
        // Qubit 0 alone is maximally mixed.
        let (p0, p1) = rho.measure_probs(MeasurementBasis::Computational, 0).unwrap();
        assert!((p0 - 0.5).abs() < 1e-15 && (p1 - 0.5).abs() < 1e-15);
        // After seeing 0 on qubit 0, qubit 1 is certainly 0.
        let collapsed = rho.collapse(MeasurementBasis::Computational, 0, 0).unwrap();
        let (q0, _) = collapsed
            .measure_probs(MeasurementBasis::Computational, 1)
            .unwrap();
        assert!((q0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn amplitude_damping_example_values() {
        // E(|+><+|) at p = 0.36 is [[0.68, 0.4], [0.4, 0.32]] and the
        // diagonal-basis probabilities become (0.9, 0.1).
        let plus = DensityMatrix::zero_state(1)
            .apply_gate(&Gate::h(), &[0])
            .unwrap();
        let ch = KrausChannel::new(NoiseKind::AmplitudeDamping, 0.36).unwrap();
        let rho = plus.apply_channel(&ch, 0).unwrap();
        let expected = ComplexMatrix::from_real(2, &[0.68, 0.4, 0.4, 0.32]).unwrap();
        assert!(rho.matrix().max_abs_diff(&expected) < 1e-12);
        let (p_plus, p_minus) = rho.measure_probs(MeasurementBasis::Diagonal, 0).unwrap();
        assert!((p_plus - 0.9).abs() < 1e-12);
        assert!((p_minus - 0.1).abs() < 1e-12);
    }

    #[test]
    fn depolarizing_mixes_towards_identity() {
        // E(|0><0|) = (1-p)|0><0| + p I/2 has diagonal (1 - p/2, p/2).
        let p = 0.4;
        let ch = KrausChannel::new(NoiseKind::Depolarizing, p).unwrap();
        let rho = DensityMatrix::zero_state(1).apply_channel(&ch, 0).unwrap();
        assert!((rho.entry(0, 0).re - (1.0 - p / 2.0)).abs() < 1e-12);
        assert!((rho.entry(1, 1).re - p / 2.0).abs() < 1e-12);
    }

    #[test]
    fn channel_on_one_arm_leaves_the_other_marginal_alone() {
        let bell = DensityMatrix::zero_state(2)
            .apply_gate(&Gate::h(), &[0])
            .unwrap()
            .apply_gate(&Gate::cnot(), &[0, 1])
            .unwrap();
        let ch = KrausChannel::new(NoiseKind::AmplitudeDamping, 0.7).unwrap();
        let noisy = bell.apply_channel(&ch, 1).unwrap();
        noisy.validate().unwrap();
        // Alice's marginal stays maximally mixed whatever happens to Bob.
        let (p0, p1) = noisy
            .measure_probs(MeasurementBasis::Computational, 0)
            .unwrap();
        assert!((p0 - 0.5).abs() < 1e-12 && (p1 - 0.5).abs() < 1e-12);
    }

    #[test]
    fn collapse_rejects_impossible_outcomes() {
        let rho = DensityMatrix::zero_state(1);
        let err = rho
            .collapse(MeasurementBasis::Computational, 0, 1)
            .unwrap_err();
        assert!(matches!(err, QuantumError::ImpossibleOutcome { .. }));
    }

    #[test]
    fn out_of_range_targets_are_rejected() {
        let rho = DensityMatrix::zero_state(1);
        assert!(matches!(
            rho.apply_gate(&Gate::x(), &[1]),
            Err(QuantumError::QubitOutOfRange { index: 1, qubits: 1 })
        ));
        assert!(matches!(
            rho.apply_gate(&Gate::cnot(), &[0]),
            Err(QuantumError::TargetCountMismatch { .. })
        ));
        let two = DensityMatrix::zero_state(2);
        assert!(matches!(
            two.apply_gate(&Gate::cnot(), &[1, 1]),
            Err(QuantumError::IdenticalTargets)
        ));
    }

    #[test]
    fn from_matrix_rejects_unnormalised_input() {
        let double = ComplexMatrix::from_real(2, &[2.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(matches!(
            DensityMatrix::from_matrix(double),
            Err(QuantumError::InvalidState {
                property: "unit-trace",
                ..
            })
        ));
        let non_psd = ComplexMatrix::from_real(2, &[1.5, 0.0, 0.0, -0.5]).unwrap();
        assert!(matches!(
            DensityMatrix::from_matrix(non_psd),
            Err(QuantumError::InvalidState {
                property: "positive-semidefiniteness",
                ..
            })
        ));
    }
}
