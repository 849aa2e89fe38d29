//! Quantum key distribution sessions over noisy links and devices.
//!
//! The crate simulates BB84 (prepare-and-measure) and BBM92
//! (entanglement-based) sessions on the density-matrix backend from
//! `quantum-core`, sifts the raw keys, and accumulates per-session quantum
//! bit error rates into reproducible corpora. Randomness is counter-based:
//! one ChaCha stream per session, so corpora are byte-identical across
//! thread counts and run orders.

mod corpus;
mod error;
mod qber;
pub mod rng;
mod session;

pub use corpus::{generate_corpus, load_corpus, save_corpus, sidecar_path, QberCorpus};
pub use error::QkdError;
pub use qber::compute_qber;
pub use session::{
    run_bb84, run_bbm92, run_session, NoisePlacement, NoiseStrength, Protocol, SessionConfig,
    SessionRecord,
};

pub use quantum_core::{MeasurementBasis, NoiseKind};
