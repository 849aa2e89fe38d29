//! Single key-distribution sessions.
//!
//! A session prepares `key_length` qubits (or entangled pairs), transports
//! them through a noise model, measures, and records everything needed for
//! sifting. Two protocols are implemented:
//!
//! * **BB84** (prepare-and-measure): Alice encodes a random bit in a random
//!   basis, Bob measures in his own random basis.
//! * **BBM92** (entanglement-based): a Bell pair `(|00> + |11>)/sqrt(2)` is
//!   shared; Alice and Bob measure their halves in random bases. Alice's
//!   measurement collapses the pair, so Bob's outcome is drawn from the
//!   conditional state.
//!
//! Noise enters in one of two placements:
//!
//! * [`NoisePlacement::Transmission`] applies the channel once to each
//!   qubit in flight (for BBM92: to Bob's arm of the pair).
//! * [`NoisePlacement::Gate`] models an imperfect device instead of an
//!   imperfect link: the channel hits a qubit immediately after *every*
//!   gate applied to it — state preparation, entangling, and basis
//!   rotations alike — while idle qubits and the link stay clean. Basis
//!   changes are realised as explicit Hadamards followed by computational
//!   measurements so that they are subject to gate noise too.
//!
//! The per-session noise strength is either pinned or redrawn uniformly
//! from `[0, p_max]` at the start of every session.

use quantum_core::{DensityMatrix, Gate, KrausChannel, MeasurementBasis, NoiseKind};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::QkdError;

/// Which protocol a session runs.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    Bb84,
    Bbm92,
}

impl Protocol {
    pub fn label(&self) -> &'static str {
        match self {
            Protocol::Bb84 => "bb84",
            Protocol::Bbm92 => "bbm92",
        }
    }
}

/// Where the noise channel acts.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoisePlacement {
    /// Once per qubit in transit between the parties.
    Transmission,
    /// After every gate applied to a qubit, device-noise style.
    Gate,
}

impl NoisePlacement {
    pub fn label(&self) -> &'static str {
        match self {
            NoisePlacement::Transmission => "transmission",
            NoisePlacement::Gate => "gate",
        }
    }
}

/// How the per-session noise strength is chosen.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NoiseStrength {
    /// The same strength for every session.
    Fixed(f64),
    /// Redrawn uniformly from `[0, p_max]` at the start of each session.
    Uniform { p_max: f64 },
}

impl NoiseStrength {
    fn validate(&self) -> Result<(), QkdError> {
        let bound = match self {
            NoiseStrength::Fixed(p) => *p,
            NoiseStrength::Uniform { p_max } => *p_max,
        };
        if !(0.0..=1.0).contains(&bound) {
            return Err(QkdError::InvalidConfig(format!(
                "noise strength bound must lie in [0, 1], got {bound}"
            )));
        }
        Ok(())
    }

    fn draw<R: Rng>(&self, rng: &mut R) -> f64 {
        match self {
            NoiseStrength::Fixed(p) => *p,
            NoiseStrength::Uniform { p_max } => rng.random::<f64>() * p_max,
        }
    }
}

/// Everything needed to simulate one session.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SessionConfig {
    pub protocol: Protocol,
    pub placement: NoisePlacement,
    pub noise: NoiseKind,
    pub strength: NoiseStrength,
    /// Number of raw bits (BB84) or pairs (BBM92) per session.
    pub key_length: usize,
}

impl SessionConfig {
    pub fn validate(&self) -> Result<(), QkdError> {
        if self.key_length == 0 {
            return Err(QkdError::InvalidConfig(
                "key_length must be at least 1".into(),
            ));
        }
        self.strength.validate()
    }
}

/// The raw outcome of one session, before sifting.
#[derive(Clone, Debug, PartialEq)]
pub struct SessionRecord {
    /// The noise strength actually used.
    pub strength: f64,
    pub alice_bits: Vec<u8>,
    pub alice_bases: Vec<MeasurementBasis>,
    pub bob_bases: Vec<MeasurementBasis>,
    pub bob_bits: Vec<u8>,
    /// `matched[i]` is true where the bases agree (the sifted positions).
    pub matched: Vec<bool>,
}

fn random_basis<R: Rng>(rng: &mut R) -> MeasurementBasis {
    if rng.random_bool(0.5) {
        MeasurementBasis::Diagonal
    } else {
        MeasurementBasis::Computational
    }
}

/// Samples an outcome from `(p0, p1)` and returns it as a bit.
fn sample_outcome<R: Rng>(rng: &mut R, p0: f64) -> u8 {
    u8::from(rng.random::<f64>() >= p0)
}

/// Applies `gate`, then — under gate placement — the channel to every qubit
/// the gate touched.
fn noisy_gate(
    rho: DensityMatrix,
    gate: &Gate,
    targets: &[usize],
    placement: NoisePlacement,
    channel: &KrausChannel,
) -> Result<DensityMatrix, QkdError> {
    let mut out = rho.apply_gate(gate, targets)?;
    if placement == NoisePlacement::Gate {
        for &t in targets {
            out = out.apply_channel(channel, t)?;
        }
    }
    Ok(out)
}

/// Runs one BB84 session, drawing all randomness from `rng`.
pub fn run_bb84<R: Rng>(config: &SessionConfig, rng: &mut R) -> Result<SessionRecord, QkdError> {
    config.validate()?;
    let strength = config.strength.draw(rng);
    let channel = KrausChannel::new(config.noise, strength)?;
    let placement = config.placement;
    let l = config.key_length;

    let mut record = SessionRecord {
        strength,
        alice_bits: Vec::with_capacity(l),
        alice_bases: Vec::with_capacity(l),
        bob_bases: Vec::with_capacity(l),
        bob_bits: Vec::with_capacity(l),
        matched: Vec::with_capacity(l),
    };

    for _ in 0..l {
        let alice_bit = u8::from(rng.random_bool(0.5));
        let alice_basis = random_basis(rng);
        let bob_basis = random_basis(rng);

        // Alice prepares her bit in her basis.
        let mut rho = DensityMatrix::zero_state(1);
        if alice_bit == 1 {
            rho = noisy_gate(rho, &Gate::x(), &[0], placement, &channel)?;
        }
        if alice_basis == MeasurementBasis::Diagonal {
            rho = noisy_gate(rho, &Gate::h(), &[0], placement, &channel)?;
        }

        let bob_bit = match placement {
            NoisePlacement::Transmission => {
                // The qubit picks up noise on the link; Bob measures
                // projectively in his basis.
                rho = rho.apply_channel(&channel, 0)?;
                let (p0, _) = rho.measure_probs(bob_basis, 0)?;
                sample_outcome(rng, p0)
            }
            NoisePlacement::Gate => {
                // Clean link; Bob undoes his basis with a (noisy) Hadamard
                // and reads out computationally.
                if bob_basis == MeasurementBasis::Diagonal {
                    rho = noisy_gate(rho, &Gate::h(), &[0], placement, &channel)?;
                }
                let (p0, _) = rho.measure_probs(MeasurementBasis::Computational, 0)?;
                sample_outcome(rng, p0)
            }
        };

        record.alice_bits.push(alice_bit);
        record.alice_bases.push(alice_basis);
        record.bob_bases.push(bob_basis);
        record.bob_bits.push(bob_bit);
        record.matched.push(alice_basis == bob_basis);
    }
    Ok(record)
}

/// Runs one BBM92 session, drawing all randomness from `rng`.
pub fn run_bbm92<R: Rng>(config: &SessionConfig, rng: &mut R) -> Result<SessionRecord, QkdError> {
    config.validate()?;
    let strength = config.strength.draw(rng);
    let channel = KrausChannel::new(config.noise, strength)?;
    let placement = config.placement;
    let l = config.key_length;

    let mut record = SessionRecord {
        strength,
        alice_bits: Vec::with_capacity(l),
        alice_bases: Vec::with_capacity(l),
        bob_bases: Vec::with_capacity(l),
        bob_bits: Vec::with_capacity(l),
        matched: Vec::with_capacity(l),
    };

    for _ in 0..l {
        let alice_basis = random_basis(rng);
        let bob_basis = random_basis(rng);

        // Source prepares the Bell pair (|00> + |11>)/sqrt(2); qubit 0 goes
        // to Alice, qubit 1 to Bob.
        let mut rho = DensityMatrix::zero_state(2);
        rho = noisy_gate(rho, &Gate::h(), &[0], placement, &channel)?;
        rho = noisy_gate(rho, &Gate::cnot(), &[0, 1], placement, &channel)?;

        let (alice_bit, bob_bit) = match placement {
            NoisePlacement::Transmission => {
                // Only Bob's arm travels through the noisy link.
                rho = rho.apply_channel(&channel, 1)?;
                let (pa0, _) = rho.measure_probs(alice_basis, 0)?;
                let a = sample_outcome(rng, pa0);
                rho = rho.collapse(alice_basis, 0, a)?;
                let (pb0, _) = rho.measure_probs(bob_basis, 1)?;
                let b = sample_outcome(rng, pb0);
                (a, b)
            }
            NoisePlacement::Gate => {
                if alice_basis == MeasurementBasis::Diagonal {
                    rho = noisy_gate(rho, &Gate::h(), &[0], placement, &channel)?;
                }
                if bob_basis == MeasurementBasis::Diagonal {
                    rho = noisy_gate(rho, &Gate::h(), &[1], placement, &channel)?;
                }
                let (pa0, _) = rho.measure_probs(MeasurementBasis::Computational, 0)?;
                let a = sample_outcome(rng, pa0);
                rho = rho.collapse(MeasurementBasis::Computational, 0, a)?;
                let (pb0, _) = rho.measure_probs(MeasurementBasis::Computational, 1)?;
                let b = sample_outcome(rng, pb0);
                (a, b)
            }
        };

        record.alice_bits.push(alice_bit);
        record.alice_bases.push(alice_basis);
        record.bob_bases.push(bob_basis);
        record.bob_bits.push(bob_bit);
        record.matched.push(alice_basis == bob_basis);
    }
    Ok(record)
}

/// Dispatches on the configured protocol.
pub fn run_session<R: Rng>(config: &SessionConfig, rng: &mut R) -> Result<SessionRecord, QkdError> {
    match config.protocol {
        Protocol::Bb84 => run_bb84(config, rng),
        Protocol::Bbm92 => run_bbm92(config, rng),
    }
}
