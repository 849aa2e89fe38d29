//! Principal component analysis on standardized features.
//!
//! Columns are z-scored (centred, divided by the population standard
//! deviation), the covariance matrix of the standardized data is
//! diagonalised with a cyclic Jacobi sweep, and the top eigenvectors become
//! the projection. The full explained-variance spectrum is kept on the
//! model so callers can plot a scree curve regardless of how many
//! components they retain.

use serde::{Deserialize, Serialize};

use crate::data::{check_matrix, check_query};
use crate::error::MlError;

/// How many components to keep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PcaTarget {
    /// Exactly this many components.
    Components(usize),
    /// The smallest count whose cumulative explained-variance ratio
    /// reaches the threshold (in `(0, 1]`).
    VarianceThreshold(f64),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    /// Per-feature training means.
    pub means: Vec<f64>,
    /// Per-feature training standard deviations (population), floored to
    /// avoid dividing by zero on constant columns.
    pub scales: Vec<f64>,
    /// Retained eigenvectors, one row per component, unit length.
    pub components: Vec<Vec<f64>>,
    /// Ratio of variance explained by every component (descending, sums to
    /// one), not just the retained ones.
    pub explained_variance_ratio: Vec<f64>,
}

const SCALE_FLOOR: f64 = 1e-12;

impl PcaModel {
    /// Number of retained components.
    pub fn output_dim(&self) -> usize {
        self.components.len()
    }

    pub fn input_dim(&self) -> usize {
        self.means.len()
    }

    /// Cumulative explained-variance ratio of the retained components.
    pub fn retained_variance(&self) -> f64 {
        self.explained_variance_ratio[..self.output_dim()]
            .iter()
            .sum()
    }

    /// Projects rows into the component space.
    pub fn transform(&self, x: &[Vec<f64>]) -> Result<Vec<Vec<f64>>, MlError> {
        x.iter()
            .map(|row| {
                check_query(self.input_dim(), row)?;
                let z: Vec<f64> = row
                    .iter()
                    .zip(self.means.iter().zip(self.scales.iter()))
                    .map(|(v, (m, s))| (v - m) / s)
                    .collect();
                Ok(self
                    .components
                    .iter()
                    .map(|c| c.iter().zip(z.iter()).map(|(a, b)| a * b).sum())
                    .collect())
            })
            .collect()
    }
}

/// Fits a PCA on `x` and keeps components according to `target`.
pub fn fit_pca(x: &[Vec<f64>], target: PcaTarget) -> Result<PcaModel, MlError> {
    let dim = check_matrix(x)?;
    let n = x.len();
    if n < 2 {
        return Err(MlError::InvalidParameter(
            "pca needs at least two rows".into(),
        ));
    }

    let mut means = vec![0.0f64; dim];
    for row in x {
        for (m, v) in means.iter_mut().zip(row.iter()) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= n as f64;
    }
    let mut scales = vec![0.0f64; dim];
    for row in x {
        for (s, (v, m)) in scales.iter_mut().zip(row.iter().zip(means.iter())) {
            *s += (v - m) * (v - m);
        }
    }
    for s in &mut scales {
        *s = (*s / n as f64).sqrt().max(SCALE_FLOOR);
    }

    // Covariance of the standardized data, (n - 1) divisor.
    let mut cov = vec![0.0f64; dim * dim];
    for row in x {
        let z: Vec<f64> = row
            .iter()
            .zip(means.iter().zip(scales.iter()))
            .map(|(v, (m, s))| (v - m) / s)
            .collect();
        for r in 0..dim {
            for c in r..dim {
                cov[r * dim + c] += z[r] * z[c];
            }
        }
    }
    for r in 0..dim {
        for c in r..dim {
            let v = cov[r * dim + c] / (n - 1) as f64;
            cov[r * dim + c] = v;
            cov[c * dim + r] = v;
        }
    }

    let (eigenvalues, eigenvectors) = jacobi_eigen(cov, dim);

    // Order components by decreasing eigenvalue (index breaks exact ties).
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| {
        eigenvalues[b]
            .partial_cmp(&eigenvalues[a])
            .expect("finite eigenvalues")
            .then(a.cmp(&b))
    });

    let clamped: Vec<f64> = order.iter().map(|&i| eigenvalues[i].max(0.0)).collect();
    let total: f64 = clamped.iter().sum();
    if total <= 0.0 {
        return Err(MlError::InvalidParameter(
            "all features have zero variance".into(),
        ));
    }
    let ratio: Vec<f64> = clamped.iter().map(|v| v / total).collect();

    let keep = match target {
        PcaTarget::Components(k) => {
            if k == 0 || k > dim {
                return Err(MlError::InvalidParameter(format!(
                    "cannot keep {k} of {dim} components"
                )));
            }
            k
        }
        PcaTarget::VarianceThreshold(t) => {
            if !(t > 0.0 && t <= 1.0) {
                return Err(MlError::InvalidParameter(format!(
                    "variance threshold {t} outside (0, 1]"
                )));
            }
            let mut cumulative = 0.0;
            let mut k = dim;
            for (i, r) in ratio.iter().enumerate() {
                cumulative += r;
                if cumulative >= t - 1e-9 {
                    k = i + 1;
                    break;
                }
            }
            k
        }
    };

    let mut components = Vec::with_capacity(keep);
    for &col in order.iter().take(keep) {
        let mut component: Vec<f64> = (0..dim).map(|r| eigenvectors[r * dim + col]).collect();
        // Deterministic sign: the entry of largest magnitude is positive.
        let lead = component
            .iter()
            .enumerate()
            .max_by(|(ia, a), (ib, b)| {
                a.abs()
                    .partial_cmp(&b.abs())
                    .expect("finite")
                    .then(ib.cmp(ia))
            })
            .map(|(i, _)| i)
            .expect("non-empty component");
        if component[lead] < 0.0 {
            for v in &mut component {
                *v = -*v;
            }
        }
        components.push(component);
    }

    Ok(PcaModel {
        means,
        scales,
        components,
        explained_variance_ratio: ratio,
    })
}

/// Cyclic Jacobi diagonalisation of a symmetric matrix with eigenvector
/// accumulation. Returns `(eigenvalues, V)` with `V` row-major and the
/// eigenvector for `eigenvalues[j]` in column `j`.
fn jacobi_eigen(mut a: Vec<f64>, n: usize) -> (Vec<f64>, Vec<f64>) {
    const MAX_SWEEPS: usize = 128;
    let mut v = vec![0.0f64; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    let norm_sq: f64 = a.iter().map(|x| x * x).sum();
    if norm_sq > 0.0 {
        for _ in 0..MAX_SWEEPS {
            let mut off_sq = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off_sq += a[p * n + q] * a[p * n + q];
                }
            }
            if off_sq <= 1e-30 * norm_sq {
                break;
            }
            for p in 0..n - 1 {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                    let c = 1.0 / (t * t + 1.0).sqrt();
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[k * n + p];
                        let akq = a[k * n + q];
                        a[k * n + p] = c * akp - s * akq;
                        a[k * n + q] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[p * n + k];
                        let aqk = a[q * n + k];
                        a[p * n + k] = c * apk - s * aqk;
                        a[q * n + k] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[k * n + p];
                        let vkq = v[k * n + q];
                        v[k * n + p] = c * vkp - s * vkq;
                        v[k * n + q] = s * vkp + c * vkq;
                    }
                }
            }
        }
    }
    ((0..n).map(|i| a[i * n + i]).collect(), v)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Four rows, three features; reference values computed independently.
    fn reference_input() -> Vec<Vec<f64>> {
        vec![
            vec![2.0, 0.0, 1.0],
            vec![4.0, 2.0, 1.0],
            vec![6.0, 2.0, 3.0],
            vec![8.0, 4.0, 3.0],
        ]
    }

    #[test]
    fn reference_fit_matches_frozen_values() {
        let model = fit_pca(&reference_input(), PcaTarget::Components(3)).unwrap();
        assert_eq!(model.means, vec![5.0, 2.0, 2.0]);
        assert!((model.scales[0] - 5.0f64.sqrt()).abs() < 1e-12);
        assert!((model.scales[1] - 2.0f64.sqrt()).abs() < 1e-12);
        assert!((model.scales[2] - 1.0).abs() < 1e-12);
        let ratio = &model.explained_variance_ratio;
        assert!((ratio[0] - 0.901386486).abs() < 1e-8);
        assert!((ratio[1] - 0.098613514).abs() < 1e-8);
        assert!(ratio[2].abs() < 1e-12);
        let expected_first = [0.60758702, 0.56841585, 0.55474448];
        for (a, b) in model.components[0].iter().zip(expected_first.iter()) {
            assert!((a - b).abs() < 1e-7, "{a} vs {b}");
        }
        let expected_second = [-0.07640689, -0.65337847, 0.75316569];
        for (a, b) in model.components[1].iter().zip(expected_second.iter()) {
            assert!((a - b).abs() < 1e-7, "{a} vs {b}");
        }
        let projected = model.transform(&reference_input()).unwrap();
        assert!((projected[0][0] - (-2.17376941)).abs() < 1e-7);
        assert!((projected[0][1] - 0.27336160).abs() < 1e-7);
    }

    #[test]
    fn components_are_orthonormal() {
        let mut rows = Vec::new();
        let mut state = 0x1234_5678u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for _ in 0..60 {
            let a = next();
            let b = next();
            rows.push(vec![a, 0.5 * a + b, b, next(), a - 2.0 * b]);
        }
        let model = fit_pca(&rows, PcaTarget::Components(5)).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let dot: f64 = model.components[i]
                    .iter()
                    .zip(model.components[j].iter())
                    .map(|(a, b)| a * b)
                    .sum();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expected).abs() < 1e-9, "({i},{j}) dot {dot}");
            }
        }
        let sum: f64 = model.explained_variance_ratio.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9);
    }

    #[test]
    fn variance_threshold_picks_smallest_sufficient_count() {
        // Perfectly correlated pair + independent column: two non-zero
        // eigenvalues, the first explaining 2/3 of the variance.
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|i| {
                let a = (i as f64 * 0.7).sin();
                let b = (i as f64 * 1.3).cos();
                vec![a, a, b]
            })
            .collect();
        let model = fit_pca(&rows, PcaTarget::VarianceThreshold(0.6)).unwrap();
        assert_eq!(model.output_dim(), 1);
        let model = fit_pca(&rows, PcaTarget::VarianceThreshold(0.99)).unwrap();
        assert_eq!(model.output_dim(), 2);
        let model = fit_pca(&rows, PcaTarget::VarianceThreshold(1.0)).unwrap();
        assert!(model.retained_variance() > 1.0 - 1e-9);
    }

    #[test]
    fn constant_column_does_not_break_the_fit() {
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|i| vec![i as f64, 4.25, (i as f64).cos()])
            .collect();
        let model = fit_pca(&rows, PcaTarget::Components(3)).unwrap();
        let projected = model.transform(&rows).unwrap();
        assert!(projected
            .iter()
            .all(|r| r.iter().all(|v| v.is_finite())));
    }

    #[test]
    fn invalid_targets_are_rejected() {
        let rows = reference_input();
        assert!(fit_pca(&rows, PcaTarget::Components(0)).is_err());
        assert!(fit_pca(&rows, PcaTarget::Components(4)).is_err());
        assert!(fit_pca(&rows, PcaTarget::VarianceThreshold(0.0)).is_err());
        assert!(fit_pca(&rows, PcaTarget::VarianceThreshold(1.1)).is_err());
    }

    #[test]
    fn transform_rejects_wrong_width() {
        let model = fit_pca(&reference_input(), PcaTarget::Components(2)).unwrap();
        assert!(model.transform(&[vec![1.0, 2.0]]).is_err());
    }
}
