//! Dense square complex matrices, sized for one- and two-qubit operators.
//!
//! Nothing here is tuned for large dimensions: every register this crate
//! touches is 2x2 or 4x4, so the implementation favours clarity (row-major
//! `Vec`, naive triple-loop product) over blocking or SIMD.

use num_complex::Complex64;

use crate::error::QuantumError;

/// Shorthand constructor used throughout the crate.
#[inline]
pub fn cx(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// A square matrix of `Complex64` entries in row-major order.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    /// The `dim` x `dim` zero matrix.
    pub fn zeros(dim: usize) -> Self {
        ComplexMatrix {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    /// The `dim` x `dim` identity matrix.
    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.set(i, i, cx(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix from `dim * dim` row-major entries.
    pub fn from_elements(dim: usize, elements: &[Complex64]) -> Result<Self, QuantumError> {
        if elements.len() != dim * dim {
            return Err(QuantumError::DimensionMismatch {
                expected: dim * dim,
                actual: elements.len(),
            });
        }
        Ok(ComplexMatrix {
            dim,
            data: elements.to_vec(),
        })
    }

    /// Builds a matrix from row-major real entries (imaginary parts zero).
    pub fn from_real(dim: usize, elements: &[f64]) -> Result<Self, QuantumError> {
        let complex: Vec<Complex64> = elements.iter().map(|&re| cx(re, 0.0)).collect();
        Self::from_elements(dim, &complex)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.data[row * self.dim + col] = value;
    }

    /// Matrix product `self * rhs`.
    pub fn mul(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "product of mismatched dimensions");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.get(r, k);
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                for c in 0..n {
                    let v = out.get(r, c) + a * rhs.get(k, c);
                    out.set(r, c, v);
                }
            }
        }
        out
    }

    /// Entrywise sum.
    pub fn add(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "sum of mismatched dimensions");
        let data = self
            .data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| a + b)
            .collect();
        ComplexMatrix { dim: self.dim, data }
    }

    /// Entrywise scaling by a real factor.
    pub fn scale(&self, factor: f64) -> ComplexMatrix {
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().map(|z| z * factor).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> ComplexMatrix {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.set(c, r, self.get(r, c).conj());
            }
        }
        out
    }

    /// Kronecker product `self (x) rhs`; the left operand owns the
    /// high-order index bits of the result.
    pub fn kron(&self, rhs: &ComplexMatrix) -> ComplexMatrix {
        let (a, b) = (self.dim, rhs.dim);
        let mut out = Self::zeros(a * b);
        for ra in 0..a {
            for ca in 0..a {
                let f = self.get(ra, ca);
                if f.norm_sqr() == 0.0 {
                    continue;
                }
                for rb in 0..b {
                    for cb in 0..b {
                        out.set(ra * b + rb, ca * b + cb, f * rhs.get(rb, cb));
                    }
                }
            }
        }
        out
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Largest entrywise deviation from the conjugate transpose.
    pub fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0f64;
        for r in 0..self.dim {
            for c in r..self.dim {
                worst = worst.max((self.get(r, c) - self.get(c, r).conj()).norm());
            }
        }
        worst
    }

    /// Largest entrywise absolute difference between two matrices.
    pub fn max_abs_diff(&self, rhs: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, rhs.dim, "comparison of mismatched dimensions");
        self.data
            .iter()
            .zip(rhs.data.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Eigenvalues of a Hermitian matrix, ascending.
    ///
    /// `H = A + iB` is embedded as the real symmetric matrix
    /// `[[A, -B], [B, A]]`, whose spectrum is that of `H` with every
    /// eigenvalue doubled; a cyclic Jacobi sweep then diagonalises the
    /// embedding and adjacent pairs are averaged back out.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        let n = self.dim;
        let m = 2 * n;
        let mut a = vec![0.0f64; m * m];
        for r in 0..n {
            for c in 0..n {
                let z = self.get(r, c);
                a[r * m + c] = z.re;
                a[r * m + (c + n)] = -z.im;
                a[(r + n) * m + c] = z.im;
                a[(r + n) * m + (c + n)] = z.re;
            }
        }
        let mut eig = jacobi_eigenvalues(&mut a, m);
        eig.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
        (0..n).map(|i| 0.5 * (eig[2 * i] + eig[2 * i + 1])).collect()
    }
}

/// Diagonalises a real symmetric matrix in place by cyclic Jacobi rotations
/// and returns its diagonal. Only eigenvalues are needed here, so no
/// eigenvector accumulation is performed.
fn jacobi_eigenvalues(a: &mut [f64], n: usize) -> Vec<f64> {
    const MAX_SWEEPS: usize = 64;
    let norm_sq: f64 = a.iter().map(|v| v * v).sum();
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
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}
