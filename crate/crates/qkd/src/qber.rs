//! Sifting and the quantum bit error rate.

use crate::session::SessionRecord;

/// The fraction of sifted positions (matching bases) where the two parties
/// disagree.
///
/// Returns `None` when no bases matched, since the rate is then undefined;
/// callers are expected to resample such sessions.
pub fn compute_qber(record: &SessionRecord) -> Option<f64> {
    let mut matched = 0usize;
    let mut errors = 0usize;
    for i in 0..record.matched.len() {
        if record.matched[i] {
            matched += 1;
            if record.alice_bits[i] != record.bob_bits[i] {
                errors += 1;
            }
        }
    }
    if matched == 0 {
        None
    } else {
        Some(errors as f64 / matched as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use quantum_core::MeasurementBasis::{Computational as C, Diagonal as D};

    fn record(
        alice_bits: Vec<u8>,
        bob_bits: Vec<u8>,
        alice_bases: Vec<quantum_core::MeasurementBasis>,
        bob_bases: Vec<quantum_core::MeasurementBasis>,
    ) -> SessionRecord {
        let matched = alice_bases
            .iter()
            .zip(bob_bases.iter())
            .map(|(a, b)| a == b)
            .collect();
        SessionRecord {
            strength: 0.0,
            alice_bits,
            alice_bases,
            bob_bases,
            bob_bits,
            matched,
        }
    }

    #[test]
    fn counts_errors_only_on_matched_positions() {
        // Positions: (C,C) match+agree, (C,D) discard (disagreement there
        // must not count), (D,D) match+with error, (C,C) match+agree.
        let rec = record(
            vec![0, 1, 1, 0],
            vec![0, 0, 0, 0],
            vec![C, C, D, C],
            vec![C, D, D, C],
        );
        assert_eq!(compute_qber(&rec), Some(1.0 / 3.0));
    }

    #[test]
    fn no_matched_positions_is_undefined() {
        let rec = record(vec![0, 1], vec![0, 1], vec![C, D], vec![D, C]);
        assert_eq!(compute_qber(&rec), None);
    }

    #[test]
    fn all_errors_gives_rate_one() {
        let rec = record(vec![1, 1], vec![0, 0], vec![C, C], vec![C, C]);
        assert_eq!(compute_qber(&rec), Some(1.0));
    }
}
