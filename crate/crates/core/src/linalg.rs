//! Small dense symmetric matrices and a Cholesky solver.
//!
//! Cluster systems are at most a few dozen unknowns, so everything here is
//! plain row-major storage with no blocking.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Pivots at or below this fraction of the largest diagonal entry are treated as zero.
const PIVOT_TOL: f64 = 1e-14;

/// Dense symmetric `n x n` matrix, stored in full row-major form.
#[derive(Clone, Debug, PartialEq)]
pub struct SymMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(n: usize) -> Self {
        SymMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds the matrix from the lower triangle; `f(i, j)` is only called for `j <= i`
    /// and mirrored, so the result is symmetric bit-for-bit.
    pub fn from_lower_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            for j in 0..=i {
                let v = f(i, j);
                m.data[i * n + j] = v;
                m.data[j * n + i] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Returns `self + shift * I`.
    pub fn with_diagonal_shift(&self, shift: f64) -> SymMatrix {
        let mut m = self.clone();
        for i in 0..self.n {
            m.data[i * self.n + i] += shift;
        }
        m
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.n);
        (0..self.n).map(|i| dot(self.row(i), v)).collect()
    }

    /// `vᵀ M v`.
    pub fn quadratic_form(&self, v: &[f64]) -> f64 {
        dot(v, &self.mul_vec(v))
    }

    /// Principal submatrix on `idx` (in the given order).
    pub fn select(&self, idx: &[usize]) -> SymMatrix {
        SymMatrix::from_lower_fn(idx.len(), |i, j| self.get(idx[i], idx[j]))
    }

    fn max_diagonal(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).fold(0.0, f64::max)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Lower-triangular factor `L` with `A = L Lᵀ`.
#[derive(Clone, Debug)]
pub struct Cholesky {
    n: usize,
    lower: Vec<f64>,
}

impl Cholesky {
    /// Factorizes a symmetric positive definite matrix.
    pub fn factor(a: &SymMatrix) -> Result<Self> {
        let n = a.dim();
        let tol = PIVOT_TOL * a.max_diagonal();
        let mut l = vec![0.0; n * n];
        for j in 0..n {
            let mut d = a.get(j, j);
            for k in 0..j {
                d -= l[j * n + k] * l[j * n + k];
            }
            if d.is_nan() || d <= tol {
                return Err(Error::NumericalDegeneracy);
            }
            let d = libm::sqrt(d);
            l[j * n + j] = d;
            for i in (j + 1)..n {
                let mut s = a.get(i, j);
                for k in 0..j {
                    s -= l[i * n + k] * l[j * n + k];
                }
                l[i * n + j] = s / d;
            }
        }
        Ok(Cholesky { n, lower: l })
    }

    /// Factorizes `a + jitter * I`, starting at `start` and multiplying by ten until
    /// the factorization succeeds or `max` is exceeded. A clean factorization of `a`
    /// itself is attempted first and reports a jitter of zero.
    pub fn factor_with_jitter(a: &SymMatrix, start: f64, max: f64) -> Result<(Self, f64)> {
        if let Ok(c) = Cholesky::factor(a) {
            return Ok((c, 0.0));
        }
        let mut jitter = start;
        while jitter <= max * (1.0 + 1e-9) {
            if let Ok(c) = Cholesky::factor(&a.with_diagonal_shift(jitter)) {
                return Ok((c, jitter));
            }
            jitter *= 10.0;
        }
        Err(Error::NumericalDegeneracy)
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Solves `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Result<Vec<f64>> {
        let n = self.n;
        if b.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: b.len(),
            });
        }
        let l = &self.lower;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= l[i * n + k] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s -= l[k * n + i] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        Ok(y)
    }

    /// `L v`, used to color white Gaussian draws.
    pub fn lower_mul(&self, v: &[f64]) -> Vec<f64> {
        let n = self.n;
        (0..n)
            .map(|i| dot(&self.lower[i * n..i * n + i + 1], &v[..=i]))
            .collect()
    }
}
