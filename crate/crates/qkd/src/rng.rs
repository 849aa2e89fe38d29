//! Deterministic, parallel-safe randomness.
//!
//! Every session owns a counter-addressed ChaCha stream: the generator is
//! keyed by the master seed and the *stream id* is the session index.
//! Sessions can therefore be simulated in any order, on any number of
//! threads, and still consume exactly the same random numbers as a serial
//! run. Auxiliary stages (shuffling, splitting) derive their own sub-seeds
//! from the master seed through a SplitMix64 mix so that no two stages
//! share a stream.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator handed to a single session.
pub type SessionRng = ChaCha8Rng;

/// A ChaCha stream addressed by `(master_seed, stream)`.
pub fn stream_rng(master_seed: u64, stream: u64) -> SessionRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream);
    rng
}

/// SplitMix64: a cheap, well-mixed permutation of 64-bit words.
pub fn splitmix64(state: u64) -> u64 {
    let mut z = state.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Derives an independent sub-seed for an auxiliary stage.
///
/// Distinct `tag`s give unrelated seeds for the same master seed, so the
/// simulation, shuffle, and split stages never reuse a stream.
pub fn derive_seed(master_seed: u64, tag: u64) -> u64 {
    splitmix64(master_seed ^ splitmix64(tag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn streams_are_reproducible() {
        let a: Vec<f64> = {
            let mut rng = stream_rng(7, 42);
            (0..8).map(|_| rng.random()).collect()
        };
        let b: Vec<f64> = {
            let mut rng = stream_rng(7, 42);
            (0..8).map(|_| rng.random()).collect()
        };
        assert_eq!(a, b);
    }

    #[test]
    fn distinct_streams_differ() {
        let mut s0 = stream_rng(7, 0);
        let mut s1 = stream_rng(7, 1);
        let a: Vec<u64> = (0..4).map(|_| s0.random()).collect();
        let b: Vec<u64> = (0..4).map(|_| s1.random()).collect();
        assert_ne!(a, b);
    }

    #[test]
    fn derived_seeds_depend_on_both_inputs() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
        assert_eq!(derive_seed(9, 3), derive_seed(9, 3));
    }

    #[test]
    fn splitmix_matches_reference_values() {
        // splitmix64 as a pure hash of the counter; input 0 reproduces the
        // first output of the classic seeded-with-zero stream.
        assert_eq!(splitmix64(0), 0xe220a8397b1dcdaf);
        assert_eq!(splitmix64(1), 0x910a2dec89025cc1);
        assert_eq!(splitmix64(2), 0x975835de1c9756ce);
    }
}
