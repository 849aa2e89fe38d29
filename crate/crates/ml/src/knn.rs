//! k-nearest-neighbour classification.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{check_labels, check_matrix, check_query, Classifier};
use crate::error::MlError;

/// A memorising classifier: the training set plus `k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<u8>,
}

pub fn fit_knn(x: &[Vec<f64>], y: &[u8], k: usize) -> Result<KnnModel, MlError> {
    check_matrix(x)?;
    check_labels(x.len(), y)?;
    if k == 0 || k > x.len() {
        return Err(MlError::InvalidParameter(format!(
            "k = {k} with {} training points",
            x.len()
        )));
    }
    Ok(KnnModel {
        k,
        points: x.to_vec(),
        labels: y.to_vec(),
    })
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

impl Classifier for KnnModel {
    /// Majority vote over the `k` nearest points (Euclidean distance).
    ///
    /// All ordering is total and deterministic: neighbours are ranked by
    /// `(distance, training index)`, and a tied vote falls back to the
    /// single nearest neighbour's label.
    fn predict_one(&self, query: &[f64]) -> Result<u8, MlError> {
        check_query(self.points[0].len(), query)?;
        let mut ranked: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (squared_distance(p, query), i))
            .collect();
        let by_distance_then_index =
            |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
        if self.k < ranked.len() {
            ranked.select_nth_unstable_by(self.k - 1, by_distance_then_index);
            ranked.truncate(self.k);
        }
        ranked.sort_by(by_distance_then_index);

        let votes_for_one: usize = ranked
            .iter()
            .map(|&(_, i)| usize::from(self.labels[i]))
            .sum();
        let votes_for_zero = self.k - votes_for_one;
        Ok(match votes_for_one.cmp(&votes_for_zero) {
            std::cmp::Ordering::Greater => 1,
            std::cmp::Ordering::Less => 0,
            std::cmp::Ordering::Equal => self.labels[ranked[0].1],
        })
    }

    fn predict(&self, queries: &[Vec<f64>]) -> Result<Vec<u8>, MlError> {
        queries.par_iter().map(|q| self.predict_one(q)).collect()
    }
}
