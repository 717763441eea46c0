//! Small dense matrices: correlation matrices and their Cholesky factors.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real::Real;

/// Structural problems found in a candidate correlation matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum MatrixIssue {
    WrongLength { expected: usize, actual: usize },
    NonFinite { row: usize, col: usize },
    NonUnitDiagonal { index: usize },
    NotSymmetric { row: usize, col: usize },
    OutOfRange { row: usize, col: usize },
    NotPositiveDefinite,
}

/// Symmetric, unit-diagonal, positive definite matrix stored row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix<T> {
    dim: usize,
    entries: Vec<T>,
}

impl<T: Real> CorrelationMatrix<T> {
    /// Validates every invariant, including positive definiteness.
    pub fn new(dim: usize, entries: Vec<T>) -> Result<Self, Vec<MatrixIssue>> {
        let issues = Self::issues(dim, &entries);
        if issues.is_empty() {
            Ok(Self { dim, entries })
        } else {
            Err(issues)
        }
    }

    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self, Vec<MatrixIssue>> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(vec![MatrixIssue::WrongLength {
                expected: dim * dim,
                actual: dim * (dim - 1) + bad.len(),
            }]);
        }
        Self::new(dim, rows.iter().flatten().copied().collect())
    }

    pub fn identity(dim: usize) -> Self {
        Self::equicorrelated(dim, T::zero()).expect("identity is a correlation matrix")
    }

    /// All off-diagonal entries equal to `rho`.
    pub fn equicorrelated(dim: usize, rho: T) -> Result<Self, Vec<MatrixIssue>> {
        let entries = (0..dim * dim)
            .map(|k| if k / dim == k % dim { T::one() } else { rho })
            .collect();
        Self::new(dim, entries)
    }

    /// Every violated invariant of `entries` viewed as a `dim × dim` matrix.
    pub fn issues(dim: usize, entries: &[T]) -> Vec<MatrixIssue> {
        let mut issues = Vec::new();
        if entries.len() != dim * dim {
            issues.push(MatrixIssue::WrongLength {
                expected: dim * dim,
                actual: entries.len(),
            });
            return issues;
        }
        let at = |i: usize, j: usize| entries[i * dim + j];
        for i in 0..dim {
            for j in 0..dim {
                if !at(i, j).is_finite() {
                    issues.push(MatrixIssue::NonFinite { row: i, col: j });
                }
            }
        }
        if !issues.is_empty() {
            return issues;
        }
        for i in 0..dim {
            if at(i, i) != T::one() {
                issues.push(MatrixIssue::NonUnitDiagonal { index: i });
            }
            for j in (i + 1)..dim {
                if at(i, j) != at(j, i) {
                    issues.push(MatrixIssue::NotSymmetric { row: i, col: j });
                }
                if at(i, j).abs() > T::one() || at(j, i).abs() > T::one() {
                    issues.push(MatrixIssue::OutOfRange { row: i, col: j });
                }
            }
        }
        if issues.is_empty() && cholesky_factor(dim, entries).is_err() {
            issues.push(MatrixIssue::NotPositiveDefinite);
        }
        issues
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.dim + j]
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    /// Lower Cholesky factor; never fails for a constructed matrix.
    pub fn cholesky(&self) -> LowerTriangular<T> {
        cholesky_factor(self.dim, &self.entries).expect("validated at construction")
    }

    /// Simultaneous row/column permutation: `out[a][b] = self[perm[a]][perm[b]]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let d = self.dim;
        let entries = (0..d * d).map(|k| self.get(perm[k / d], perm[k % d])).collect();
        Self { dim: d, entries }
    }

    /// Submatrix with row/column `skip` removed.
    pub fn without(&self, skip: usize) -> Vec<T> {
        let d = self.dim;
        let mut out = Vec::with_capacity((d - 1) * (d - 1));
        for i in (0..d).filter(|&i| i != skip) {
            for j in (0..d).filter(|&j| j != skip) {
                out.push(self.get(i, j));
            }
        }
        out
    }
}

/// Lower-triangular matrix stored densely, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerTriangular<T> {
    dim: usize,
    entries: Vec<T>,
}

impl<T: Real> LowerTriangular<T> {
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.entries[i * self.dim + j]
    }

    /// `out = L·v`.
    #[inline]
    pub fn mul_vec_into(&self, v: &[T], out: &mut [T]) {
        let d = self.dim;
        for (i, o) in out.iter_mut().enumerate().take(d) {
            let row = &self.entries[i * d..i * d + i + 1];
            *o = row.iter().zip(v).fold(T::zero(), |acc, (&l, &x)| acc + l * x);
        }
    }

    /// L·Lᵀ, row-major.
    pub fn reconstruct(&self) -> Vec<T> {
        let d = self.dim;
        let mut out = vec![T::zero(); d * d];
        for i in 0..d {
            for j in 0..d {
                let k_max = i.min(j);
                out[i * d + j] = (0..=k_max).fold(T::zero(), |acc, k| acc + self.get(i, k) * self.get(j, k));
            }
        }
        out
    }

    /// Solves `L·Lᵀ x = b`.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let d = self.dim;
        let mut y = b.to_vec();
        for i in 0..d {
            let s = (0..i).fold(y[i], |acc, k| acc - self.get(i, k) * y[k]);
            y[i] = s / self.get(i, i);
        }
        for i in (0..d).rev() {
            let s = ((i + 1)..d).fold(y[i], |acc, k| acc - self.get(k, i) * y[k]);
            y[i] = s / self.get(i, i);
        }
        y
    }
}

/// Cholesky–Banachiewicz factorisation of a symmetric `dim × dim` matrix.
pub fn cholesky_factor<T: Real>(dim: usize, m: &[T]) -> Result<LowerTriangular<T>> {
    assert_eq!(m.len(), dim * dim, "matrix length must be dim²");
    let mut l = vec![T::zero(); dim * dim];
    for i in 0..dim {
        for j in 0..=i {
            let s = (0..j).fold(m[i * dim + j], |acc, k| acc - l[i * dim + k] * l[j * dim + k]);
            if i == j {
                if !(s > T::zero()) {
                    return Err(Error::NotPositiveDefinite { pivot: i });
                }
                l[i * dim + i] = s.sqrt();
            } else {
                l[i * dim + j] = s / l[j * dim + j];
            }
        }
    }
    Ok(LowerTriangular { dim, entries: l })
}
