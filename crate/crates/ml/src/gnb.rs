//! Gaussian naive Bayes.
//!
//! Features are modelled as independent Gaussians per class; classification
//! maximises `log P(class) + sum_f log N(q_f; mean, var)`. Per-class
//! variances are smoothed by `1e-9` times the largest overall feature
//! variance, which keeps constant features from collapsing the likelihood.

use serde::{Deserialize, Serialize};

use crate::data::{check_labels, check_matrix, check_query, Classifier};
use crate::error::MlError;

const VAR_SMOOTHING: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GnbModel {
    /// Class labels in ascending order; parallel to the rows of the
    /// per-class parameter vectors.
    pub classes: Vec<u8>,
    pub priors: Vec<f64>,
    pub means: Vec<Vec<f64>>,
    /// Smoothed per-class, per-feature variances.
    pub variances: Vec<Vec<f64>>,
    /// The smoothing offset that was added to every variance.
    pub smoothing: f64,
}

pub fn fit_gnb(x: &[Vec<f64>], y: &[u8]) -> Result<GnbModel, MlError> {
    let dim = check_matrix(x)?;
    check_labels(x.len(), y)?;
    let mut classes: Vec<u8> = y.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(MlError::SingleClass);
    }

    // Largest population variance over all features of the whole set.
    let n = x.len() as f64;
    let mut overall_max_var = 0.0f64;
    for f in 0..dim {
        let mean = x.iter().map(|r| r[f]).sum::<f64>() / n;
        let var = x.iter().map(|r| (r[f] - mean).powi(2)).sum::<f64>() / n;
        overall_max_var = overall_max_var.max(var);
    }
    let smoothing = VAR_SMOOTHING * overall_max_var;

    let mut priors = Vec::with_capacity(classes.len());
    let mut means = Vec::with_capacity(classes.len());
    let mut variances = Vec::with_capacity(classes.len());
    for &class in &classes {
        let rows: Vec<&Vec<f64>> = x
            .iter()
            .zip(y.iter())
            .filter(|(_, &label)| label == class)
            .map(|(row, _)| row)
            .collect();
        let count = rows.len() as f64;
        priors.push(count / n);
        let mean: Vec<f64> = (0..dim)
            .map(|f| rows.iter().map(|r| r[f]).sum::<f64>() / count)
            .collect();
        let variance: Vec<f64> = (0..dim)
            .map(|f| {
                let v = rows.iter().map(|r| (r[f] - mean[f]).powi(2)).sum::<f64>() / count;
                v + smoothing
            })
            .collect();
        means.push(mean);
        variances.push(variance);
    }

    Ok(GnbModel {
        classes,
        priors,
        means,
        variances,
        smoothing,
    })
}

impl GnbModel {
    /// Unnormalised log-posterior of each class for a query.
    pub fn log_posteriors(&self, query: &[f64]) -> Result<Vec<f64>, MlError> {
        check_query(self.means[0].len(), query)?;
        Ok((0..self.classes.len())
            .map(|c| {
                let mut score = self.priors[c].ln();
                for (f, &q) in query.iter().enumerate() {
                    let var = self.variances[c][f].max(f64::MIN_POSITIVE);
                    let d = q - self.means[c][f];
                    score += -0.5 * (std::f64::consts::TAU * var).ln() - d * d / (2.0 * var);
                }
                score
            })
            .collect())
    }
}

impl Classifier for GnbModel {
    /// The class with the highest log-posterior; exact ties resolve to the
    /// lowest class label.
    fn predict_one(&self, query: &[f64]) -> Result<u8, MlError> {
        let scores = self.log_posteriors(query)?;
        let mut best = 0usize;
        for (i, score) in scores.iter().enumerate().skip(1) {
            if *score > scores[best] {
                best = i;
            }
        }
        Ok(self.classes[best])
    }
}
