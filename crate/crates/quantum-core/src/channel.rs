//! Single-qubit noise channels in operator-sum (Kraus) form.
//!
//! A channel is a family `{E_k}` acting as
//!
//! ```text
//! rho  ->  sum_k E_k rho E_k^dagger
//! ```
//!
//! with the trace-preservation (completeness) constraint
//! `sum_k E_k^dagger E_k = I`. Three parameterised families are provided:
//!
//! * **bit flip** - applies Pauli-X with probability `p`:
//!   `E_0 = sqrt(1-p) I`, `E_1 = sqrt(p) X`;
//! * **amplitude damping** - relaxes `|1>` towards `|0>` with probability
//!   `p`: `E_0 = [[1, 0], [0, sqrt(1-p)]]`, `E_1 = [[0, sqrt(p)], [0, 0]]`;
//! * **depolarizing** - leaves the state untouched with probability `1-p`
//!   and replaces it with the maximally mixed state otherwise:
//!   `E_0 = sqrt(1-3p/4) I`, `E_{1,2,3} = sqrt(p/4) {X, Y, Z}`.

use serde::{Deserialize, Serialize};

use crate::error::QuantumError;
use crate::matrix::{cx, ComplexMatrix};

/// The noise families a [`KrausChannel`] can represent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseKind {
    BitFlip,
    AmplitudeDamping,
    Depolarizing,
}

impl NoiseKind {
    /// Stable snake_case name, used for labels and file stems.
    pub fn label(&self) -> &'static str {
        match self {
            NoiseKind::BitFlip => "bit_flip",
            NoiseKind::AmplitudeDamping => "amplitude_damping",
            NoiseKind::Depolarizing => "depolarizing",
        }
    }
}

impl std::fmt::Display for NoiseKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

/// A concrete single-qubit channel: a noise family instantiated at a
/// strength `p` in `[0, 1]`, realised as explicit Kraus operators.
#[derive(Clone, Debug, PartialEq)]
pub struct KrausChannel {
    kind: NoiseKind,
    strength: f64,
    operators: Vec<ComplexMatrix>,
}

impl KrausChannel {
    /// Builds the Kraus family for `kind` at strength `p`.
    ///
    /// Fails with [`QuantumError::InvalidStrength`] when `p` is outside
    /// `[0, 1]` or not finite.
    pub fn new(kind: NoiseKind, strength: f64) -> Result<Self, QuantumError> {
        if !(0.0..=1.0).contains(&strength) {
            return Err(QuantumError::InvalidStrength(strength));
        }
        let p = strength;
        let operators = match kind {
            NoiseKind::BitFlip => vec![
                ComplexMatrix::identity(2).scale((1.0 - p).sqrt()),
                ComplexMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0])
                    .expect("2x2")
                    .scale(p.sqrt()),
            ],
            NoiseKind::AmplitudeDamping => vec![
                ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, (1.0 - p).sqrt()]).expect("2x2"),
                ComplexMatrix::from_real(2, &[0.0, p.sqrt(), 0.0, 0.0]).expect("2x2"),
            ],
            NoiseKind::Depolarizing => {
                let q = (p / 4.0).sqrt();
                vec![
                    ComplexMatrix::identity(2).scale((1.0 - 3.0 * p / 4.0).sqrt()),
                    // Pauli X, Y, Z in turn.
                    ComplexMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0])
                        .expect("2x2")
                        .scale(q),
                    ComplexMatrix::from_elements(
                        2,
                        &[cx(0.0, 0.0), cx(0.0, -1.0), cx(0.0, 1.0), cx(0.0, 0.0)],
                    )
                    .expect("2x2")
                    .scale(q),
                    ComplexMatrix::from_real(2, &[1.0, 0.0, 0.0, -1.0])
                        .expect("2x2")
                        .scale(q),
                ]
            }
        };
        Ok(KrausChannel {
            kind,
            strength,
            operators,
        })
    }

    pub fn kind(&self) -> NoiseKind {
        self.kind
    }

    pub fn strength(&self) -> f64 {
        self.strength
    }

    pub fn operators(&self) -> &[ComplexMatrix] {
        &self.operators
    }

    /// Largest entrywise deviation of `sum_k E_k^dagger E_k` from the
    /// identity. Zero (up to rounding) for every valid channel.
    pub fn completeness_defect(&self) -> f64 {
        let mut sum = ComplexMatrix::zeros(2);
        for e in &self.operators {
            sum = sum.add(&e.adjoint().mul(e));
        }
        sum.max_abs_diff(&ComplexMatrix::identity(2))
    }
}
