//! Soft-margin support vector machine trained with sequential minimal
//! optimization.
//!
//! The solver follows the classic two-variable decomposition: it repeatedly
//! picks a pair of dual variables that violates the Karush-Kuhn-Tucker
//! conditions, solves the two-variable subproblem analytically, and keeps an
//! incrementally-updated error cache. No kernel matrix is materialised, so
//! memory stays linear in the training-set size. All pair-selection
//! heuristics are deterministic, which keeps retraining byte-reproducible.
//!
//! Conventions: labels 0/1 map to signed classes -1/+1, the decision
//! function is `f(x) = sum_i coef_i k(sv_i, x) + bias`, and `f(x) >= 0`
//! predicts class 1.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::{check_labels, check_matrix, check_query, Classifier};
use crate::error::MlError;

/// Minimum proportional change in a dual variable for a step to count as
/// progress (Platt's `eps`).
const STEP_EPSILON: f64 = 1e-3;
/// Dual variables closer than this to a box bound are snapped onto it.
const BOUND_SNAP: f64 = 1e-10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SvmKernel {
    Linear,
    Rbf {
        gamma: f64,
    },
    Poly {
        degree: u32,
        gamma: f64,
        coef0: f64,
    },
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(p, q)| p * q).sum()
}

impl SvmKernel {
    pub fn evaluate(&self, a: &[f64], b: &[f64]) -> f64 {
        match *self {
            SvmKernel::Linear => dot(a, b),
            SvmKernel::Rbf { gamma } => {
                let sq: f64 = a.iter().zip(b).map(|(p, q)| (p - q) * (p - q)).sum();
                (-gamma * sq).exp()
            }
            SvmKernel::Poly {
                degree,
                gamma,
                coef0,
            } => (gamma * dot(a, b) + coef0).powi(degree as i32),
        }
    }

    fn validate(&self) -> Result<(), MlError> {
        match *self {
            SvmKernel::Linear => Ok(()),
            SvmKernel::Rbf { gamma } => {
                if gamma.is_finite() && gamma > 0.0 {
                    Ok(())
                } else {
                    Err(MlError::InvalidParameter(format!(
                        "rbf kernel width must be positive, got {gamma}"
                    )))
                }
            }
            SvmKernel::Poly {
                degree,
                gamma,
                coef0,
            } => {
                if degree == 0 {
                    return Err(MlError::InvalidParameter(
                        "polynomial kernel degree must be at least 1".into(),
                    ));
                }
                if !(gamma.is_finite() && gamma > 0.0) {
                    return Err(MlError::InvalidParameter(format!(
                        "polynomial kernel scale must be positive, got {gamma}"
                    )));
                }
                if !coef0.is_finite() {
                    return Err(MlError::InvalidParameter(format!(
                        "polynomial kernel offset must be finite, got {coef0}"
                    )));
                }
                Ok(())
            }
        }
    }
}

/// Solver knobs. `sweep_factor * n` bounds the number of passes over the
/// training set before the solver gives up with `NonConvergence`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SmoParams {
    /// Box constraint on the dual variables.
    pub c: f64,
    /// KKT tolerance; also the stopping threshold.
    pub tolerance: f64,
    pub sweep_factor: usize,
}

impl Default for SmoParams {
    fn default() -> Self {
        Self {
            c: 1.0,
            tolerance: 1e-3,
            sweep_factor: 10,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmModel {
    pub kernel: SvmKernel,
    pub c: f64,
    pub bias: f64,
    pub support_vectors: Vec<Vec<f64>>,
    /// `alpha_i * y_i` with `y_i` in {-1, +1}; parallel to `support_vectors`.
    pub coefficients: Vec<f64>,
    /// Positions of the support vectors in the original training set.
    pub support_indices: Vec<usize>,
}

impl SvmModel {
    /// Signed distance-like score; non-negative means class 1.
    pub fn decision(&self, query: &[f64]) -> Result<f64, MlError> {
        if let Some(first) = self.support_vectors.first() {
            check_query(first.len(), query)?;
        }
        let mut sum = self.bias;
        for (sv, coef) in self.support_vectors.iter().zip(&self.coefficients) {
            sum += coef * self.kernel.evaluate(sv, query);
        }
        Ok(sum)
    }
}

impl Classifier for SvmModel {
    fn predict_one(&self, query: &[f64]) -> Result<u8, MlError> {
        Ok(u8::from(self.decision(query)? >= 0.0))
    }

    fn predict(&self, queries: &[Vec<f64>]) -> Result<Vec<u8>, MlError> {
        queries
            .par_iter()
            .map(|q| self.predict_one(q))
            .collect::<Result<Vec<_>, _>>()
    }
}

/// The `1 / (n_features * variance)` heuristic for the RBF kernel width;
/// the variance is taken over every entry of the matrix. Falls back to
/// `1 / n_features` when the data is constant.
pub fn default_rbf_gamma(x: &[Vec<f64>]) -> Result<f64, MlError> {
    let dim = check_matrix(x)?;
    let count = (x.len() * dim) as f64;
    let mean = x.iter().flatten().sum::<f64>() / count;
    let var = x.iter().flatten().map(|v| (v - mean).powi(2)).sum::<f64>() / count;
    Ok(if var > 0.0 {
        1.0 / (dim as f64 * var)
    } else {
        1.0 / dim as f64
    })
}

struct Smo<'a> {
    x: &'a [Vec<f64>],
    /// Signed labels in {-1, +1}.
    y: Vec<f64>,
    kernel: SvmKernel,
    c: f64,
    tol: f64,
    alpha: Vec<f64>,
    /// Cached `f(x_i) - y_i`, kept consistent incrementally.
    errors: Vec<f64>,
    bias: f64,
    /// LCG state for the deterministic fallback scan offsets.
    pick_state: u64,
}

impl Smo<'_> {
    fn k(&self, i: usize, j: usize) -> f64 {
        self.kernel.evaluate(&self.x[i], &self.x[j])
    }

    /// Strictly inside the box, i.e. not pinned at 0 or C.
    fn is_free(&self, i: usize) -> bool {
        self.alpha[i] > 0.0 && self.alpha[i] < self.c
    }

    /// Deterministic pseudo-random start offset for the fallback scans.
    fn pick_start(&mut self, len: usize) -> usize {
        self.pick_state = self
            .pick_state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        ((self.pick_state >> 33) as usize) % len
    }

    /// Tries to improve the objective using `i2` as the second variable.
    fn examine(&mut self, i2: usize) -> usize {
        let y2 = self.y[i2];
        let alpha2 = self.alpha[i2];
        let e2 = self.errors[i2];
        let r2 = e2 * y2;
        let violates = (r2 < -self.tol && alpha2 < self.c) || (r2 > self.tol && alpha2 > 0.0);
        if !violates {
            return 0;
        }

        // First choice: the free point maximising |E1 - E2| (largest
        // expected step). Ties break to the lower index.
        let mut best: Option<(f64, usize)> = None;
        for i in 0..self.x.len() {
            if self.is_free(i) {
                let gap = (self.errors[i] - e2).abs();
                if best.is_none_or(|(best_gap, _)| gap > best_gap) {
                    best = Some((gap, i));
                }
            }
        }
        if let Some((_, i1)) = best {
            if self.take_step(i1, i2) {
                return 1;
            }
        }

        // Fallbacks: scan the free points, then every point, starting from
        // a deterministic pseudo-random offset.
        let n = self.x.len();
        let start = self.pick_start(n);
        for off in 0..n {
            let i1 = (start + off) % n;
            if self.is_free(i1) && self.take_step(i1, i2) {
                return 1;
            }
        }
        let start = self.pick_start(n);
        for off in 0..n {
            let i1 = (start + off) % n;
            if self.take_step(i1, i2) {
                return 1;
            }
        }
        0
    }

    /// Jointly optimises the pair `(i1, i2)`; returns whether the duals
    /// moved meaningfully.
    fn take_step(&mut self, i1: usize, i2: usize) -> bool {
        if i1 == i2 {
            return false;
        }
        let (y1, y2) = (self.y[i1], self.y[i2]);
        let (alpha1, alpha2) = (self.alpha[i1], self.alpha[i2]);
        let (e1, e2) = (self.errors[i1], self.errors[i2]);
        let s = y1 * y2;
        // Feasible segment for alpha2 given the equality constraint.
        let (lo, hi) = if s < 0.0 {
            (
                (alpha2 - alpha1).max(0.0),
                (self.c + alpha2 - alpha1).min(self.c),
            )
        } else {
            (
                (alpha1 + alpha2 - self.c).max(0.0),
                (alpha1 + alpha2).min(self.c),
            )
        };
        if hi - lo < 1e-12 {
            return false;
        }
        let k11 = self.k(i1, i1);
        let k12 = self.k(i1, i2);
        let k22 = self.k(i2, i2);
        let eta = k11 + k22 - 2.0 * k12;
        let mut a2 = if eta > 0.0 {
            (alpha2 + y2 * (e1 - e2) / eta).clamp(lo, hi)
        } else {
            // Flat or concave along the segment: the minimum of the dual
            // objective sits at an endpoint. Evaluate both.
            let f1 = y1 * (e1 - self.bias) - alpha1 * k11 - s * alpha2 * k12;
            let f2 = y2 * (e2 - self.bias) - s * alpha1 * k12 - alpha2 * k22;
            let l1 = alpha1 + s * (alpha2 - lo);
            let h1 = alpha1 + s * (alpha2 - hi);
            let obj_lo =
                l1 * f1 + lo * f2 + 0.5 * l1 * l1 * k11 + 0.5 * lo * lo * k22 + s * lo * l1 * k12;
            let obj_hi =
                h1 * f1 + hi * f2 + 0.5 * h1 * h1 * k11 + 0.5 * hi * hi * k22 + s * hi * h1 * k12;
            if obj_lo < obj_hi - STEP_EPSILON {
                lo
            } else if obj_lo > obj_hi + STEP_EPSILON {
                hi
            } else {
                alpha2
            }
        };
        if (a2 - alpha2).abs() < STEP_EPSILON * (a2 + alpha2 + STEP_EPSILON) {
            return false;
        }
        if a2 < BOUND_SNAP {
            a2 = 0.0;
        } else if a2 > self.c - BOUND_SNAP {
            a2 = self.c;
        }
        let mut a1 = alpha1 + s * (alpha2 - a2);
        if a1 < BOUND_SNAP {
            a1 = 0.0;
        } else if a1 > self.c - BOUND_SNAP {
            a1 = self.c;
        }

        // Threshold update: keep f exact on whichever new multiplier is
        // free; average the two candidates when both are at bounds.
        let d1 = y1 * (a1 - alpha1);
        let d2 = y2 * (a2 - alpha2);
        let b1 = self.bias - e1 - d1 * k11 - d2 * k12;
        let b2 = self.bias - e2 - d1 * k12 - d2 * k22;
        let new_bias = if a1 > 0.0 && a1 < self.c {
            b1
        } else if a2 > 0.0 && a2 < self.c {
            b2
        } else {
            0.5 * (b1 + b2)
        };
        let bias_delta = new_bias - self.bias;
        for i in 0..self.x.len() {
            self.errors[i] += d1 * self.k(i1, i) + d2 * self.k(i2, i) + bias_delta;
        }
        self.alpha[i1] = a1;
        self.alpha[i2] = a2;
        self.bias = new_bias;
        true
    }

    fn build_model(&self) -> SvmModel {
        let mut support_vectors = Vec::new();
        let mut coefficients = Vec::new();
        let mut support_indices = Vec::new();
        for (i, &a) in self.alpha.iter().enumerate() {
            if a > 0.0 {
                support_vectors.push(self.x[i].clone());
                coefficients.push(a * self.y[i]);
                support_indices.push(i);
            }
        }
        SvmModel {
            kernel: self.kernel,
            c: self.c,
            bias: self.bias,
            support_vectors,
            coefficients,
            support_indices,
        }
    }
}

pub fn fit_svm(
    x: &[Vec<f64>],
    y: &[u8],
    kernel: SvmKernel,
    params: SmoParams,
) -> Result<SvmModel, MlError> {
    check_matrix(x)?;
    check_labels(x.len(), y)?;
    kernel.validate()?;
    if !(params.c.is_finite() && params.c > 0.0) {
        return Err(MlError::InvalidParameter(format!(
            "box constraint must be positive, got {}",
            params.c
        )));
    }
    if !(params.tolerance.is_finite() && params.tolerance > 0.0) {
        return Err(MlError::InvalidParameter(format!(
            "tolerance must be positive, got {}",
            params.tolerance
        )));
    }
    if !(y.contains(&0) && y.contains(&1)) {
        return Err(MlError::SingleClass);
    }

    let n = x.len();
    let signed: Vec<f64> = y.iter().map(|&l| if l == 1 { 1.0 } else { -1.0 }).collect();
    let mut solver = Smo {
        x,
        errors: signed.iter().map(|v| -v).collect(), // f = 0 initially
        y: signed,
        kernel,
        c: params.c,
        tol: params.tolerance,
        alpha: vec![0.0; n],
        bias: 0.0,
        pick_state: 0,
    };

    let max_sweeps = params.sweep_factor.saturating_mul(n);
    let mut sweeps = 0usize;
    let mut num_changed = 0usize;
    let mut examine_all = true;
    while num_changed > 0 || examine_all {
        if sweeps == max_sweeps {
            return Err(MlError::NonConvergence {
                sweeps,
                model: Box::new(solver.build_model()),
            });
        }
        sweeps += 1;
        num_changed = 0;
        if examine_all {
            for i in 0..n {
                num_changed += solver.examine(i);
            }
        } else {
            for i in 0..n {
                if solver.is_free(i) {
                    num_changed += solver.examine(i);
                }
            }
        }
        if examine_all {
            examine_all = false;
        } else if num_changed == 0 {
            examine_all = true;
        }
    }

    Ok(solver.build_model())
}

/// Largest violation of the Karush-Kuhn-Tucker conditions over a training
/// set, measured on the margins `y_i * f(x_i)`: multipliers at 0 need a
/// margin of at least 1, multipliers at C a margin of at most 1, and free
/// multipliers a margin of exactly 1. A converged model stays within a
/// small multiple of the solver tolerance (the step-progress epsilon is
/// relative to the dual magnitudes).
pub fn max_kkt_violation(model: &SvmModel, x: &[Vec<f64>], y: &[u8]) -> Result<f64, MlError> {
    check_matrix(x)?;
    check_labels(x.len(), y)?;
    let mut alpha = vec![0.0; x.len()];
    for (pos, &idx) in model.support_indices.iter().enumerate() {
        if idx >= x.len() {
            return Err(MlError::InvalidParameter(format!(
                "support index {idx} outside the training set of {} rows",
                x.len()
            )));
        }
        alpha[idx] = model.coefficients[pos].abs();
    }
    let mut worst = 0.0f64;
    for (i, row) in x.iter().enumerate() {
        let signed = if y[i] == 1 { 1.0 } else { -1.0 };
        let margin = signed * model.decision(row)?;
        let violation = if alpha[i] <= 0.0 {
            1.0 - margin
        } else if alpha[i] >= model.c {
            margin - 1.0
        } else {
            (margin - 1.0).abs()
        };
        worst = worst.max(violation);
    }
    Ok(worst)
}
