//! Shared plumbing: input validation, the classifier trait, stratified
//! splitting, and accuracy/confusion evaluation.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::MlError;

/// Validates a feature matrix (non-empty, rectangular, finite) and returns
/// its column count.
pub(crate) fn check_matrix(x: &[Vec<f64>]) -> Result<usize, MlError> {
    let first = x.first().ok_or(MlError::EmptyTrainingSet)?;
    let dim = first.len();
    if dim == 0 {
        return Err(MlError::DimensionMismatch {
            expected: 1,
            actual: 0,
        });
    }
    for row in x {
        if row.len() != dim {
            return Err(MlError::DimensionMismatch {
                expected: dim,
                actual: row.len(),
            });
        }
        if row.iter().any(|v| !v.is_finite()) {
            return Err(MlError::NonFinite);
        }
    }
    Ok(dim)
}

pub(crate) fn check_labels(x_len: usize, y: &[u8]) -> Result<(), MlError> {
    if y.len() != x_len {
        return Err(MlError::DimensionMismatch {
            expected: x_len,
            actual: y.len(),
        });
    }
    if let Some(&bad) = y.iter().find(|&&label| label > 1) {
        return Err(MlError::InvalidLabel(bad));
    }
    Ok(())
}

pub(crate) fn check_query(dim: usize, q: &[f64]) -> Result<(), MlError> {
    if q.len() != dim {
        return Err(MlError::DimensionMismatch {
            expected: dim,
            actual: q.len(),
        });
    }
    Ok(())
}

/// Anything that maps a feature vector to a binary label.
pub trait Classifier {
    fn predict_one(&self, query: &[f64]) -> Result<u8, MlError>;

    /// Batch prediction; implementations may parallelise.
    fn predict(&self, queries: &[Vec<f64>]) -> Result<Vec<u8>, MlError> {
        queries.iter().map(|q| self.predict_one(q)).collect()
    }
}

/// A train/test partition of a labeled dataset.
#[derive(Clone, Debug, PartialEq)]
pub struct Split {
    pub train_x: Vec<Vec<f64>>,
    pub train_y: Vec<u8>,
    pub test_x: Vec<Vec<f64>>,
    pub test_y: Vec<u8>,
}

/// Stratified split: each label contributes `floor(train_fraction * count)`
/// rows to the training side, the remainder to the test side.
///
/// Selection within a stratum is a seeded shuffle; the chosen indices are
/// then restored to dataset order, so the output is deterministic and
/// independent of label layout. `train_fraction` may be 1.0, leaving the
/// test side empty.
pub fn train_test_split(
    x: &[Vec<f64>],
    y: &[u8],
    train_fraction: f64,
    seed: u64,
) -> Result<Split, MlError> {
    check_matrix(x)?;
    if y.len() != x.len() {
        return Err(MlError::DimensionMismatch {
            expected: x.len(),
            actual: y.len(),
        });
    }
    if !(0.0..=1.0).contains(&train_fraction) {
        return Err(MlError::InvalidParameter(format!(
            "train_fraction {train_fraction} outside [0, 1]"
        )));
    }

    let mut strata: Vec<u8> = y.to_vec();
    strata.sort_unstable();
    strata.dedup();

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train_idx = Vec::new();
    let mut test_idx = Vec::new();
    for stratum in strata {
        let mut indices: Vec<usize> = (0..y.len()).filter(|&i| y[i] == stratum).collect();
        indices.shuffle(&mut rng);
        let take = (train_fraction * indices.len() as f64).floor() as usize;
        train_idx.extend_from_slice(&indices[..take]);
        test_idx.extend_from_slice(&indices[take..]);
    }
    train_idx.sort_unstable();
    test_idx.sort_unstable();

    let gather = |idx: &[usize]| -> (Vec<Vec<f64>>, Vec<u8>) {
        (
            idx.iter().map(|&i| x[i].clone()).collect(),
            idx.iter().map(|&i| y[i]).collect(),
        )
    };
    let (train_x, train_y) = gather(&train_idx);
    let (test_x, test_y) = gather(&test_idx);
    Ok(Split {
        train_x,
        train_y,
        test_x,
        test_y,
    })
}

/// Accuracy plus the 2x2 confusion table, `confusion[actual][predicted]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub confusion: [[usize; 2]; 2],
}

/// Scores a classifier on labeled data.
pub fn evaluate<C: Classifier + ?Sized>(
    model: &C,
    x: &[Vec<f64>],
    y: &[u8],
) -> Result<Metrics, MlError> {
    check_matrix(x)?;
    check_labels(x.len(), y)?;
    let predictions = model.predict(x)?;
    let mut confusion = [[0usize; 2]; 2];
    let mut hits = 0usize;
    for (&actual, &predicted) in y.iter().zip(predictions.iter()) {
        confusion[actual as usize][predicted as usize] += 1;
        if actual == predicted {
            hits += 1;
        }
    }
    Ok(Metrics {
        accuracy: hits as f64 / y.len() as f64,
        confusion,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Constant(u8);
    impl Classifier for Constant {
        fn predict_one(&self, _q: &[f64]) -> Result<u8, MlError> {
            Ok(self.0)
        }
    }

    fn toy() -> (Vec<Vec<f64>>, Vec<u8>) {
        let x: Vec<Vec<f64>> = (0..16).map(|i| vec![i as f64]).collect();
        // 10 of label 0, 6 of label 1.
        let y = vec![0, 0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1];
        (x, y)
    }

    #[test]
    fn split_is_stratified_with_floor_semantics() {
        let (x, y) = toy();
        let split = train_test_split(&x, &y, 0.7, 1).unwrap();
        let train_ones = split.train_y.iter().filter(|&&l| l == 1).count();
        let train_zeros = split.train_y.len() - train_ones;
        assert_eq!(train_zeros, 7); // floor(0.7 * 10)
        assert_eq!(train_ones, 4); // floor(0.7 * 6)
        assert_eq!(split.test_y.len(), 5);
        // No index lost or duplicated.
        let mut all: Vec<f64> = split
            .train_x
            .iter()
            .chain(split.test_x.iter())
            .map(|r| r[0])
            .collect();
        all.sort_by(f64::total_cmp);
        assert_eq!(all, (0..16).map(|i| i as f64).collect::<Vec<_>>());
    }

    #[test]
    fn split_is_deterministic_per_seed() {
        let (x, y) = toy();
        let a = train_test_split(&x, &y, 0.7, 9).unwrap();
        let b = train_test_split(&x, &y, 0.7, 9).unwrap();
        assert_eq!(a, b);
        let c = train_test_split(&x, &y, 0.7, 10).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn full_fraction_leaves_test_empty() {
        let (x, y) = toy();
        let split = train_test_split(&x, &y, 1.0, 0).unwrap();
        assert_eq!(split.train_y.len(), 16);
        assert!(split.test_y.is_empty());
    }

    #[test]
    fn out_of_range_fraction_is_rejected() {
        let (x, y) = toy();
        assert!(train_test_split(&x, &y, 1.2, 0).is_err());
        assert!(train_test_split(&x, &y, -0.1, 0).is_err());
        assert!(train_test_split(&x, &y, f64::NAN, 0).is_err());
    }

    #[test]
    fn evaluate_fills_the_confusion_table() {
        let (x, y) = toy();
        let metrics = evaluate(&Constant(0), &x, &y).unwrap();
        assert!((metrics.accuracy - 10.0 / 16.0).abs() < 1e-15);
        assert_eq!(metrics.confusion, [[10, 0], [6, 0]]);
    }

    #[test]
    fn ragged_or_non_finite_input_is_rejected() {
        let ragged = vec![vec![1.0, 2.0], vec![3.0]];
        assert!(matches!(
            check_matrix(&ragged),
            Err(MlError::DimensionMismatch { .. })
        ));
        let nan = vec![vec![1.0], vec![f64::NAN]];
        assert!(matches!(check_matrix(&nan), Err(MlError::NonFinite)));
        assert!(matches!(check_matrix(&[]), Err(MlError::EmptyTrainingSet)));
    }
}
