//! Dense complex linear algebra used throughout the toolkit.
//!
//! Everything here is desk-scale: matrices are stored densely in row-major
//! order and all kernels are hand-rolled. The tridiagonal QL kernel in
//! [`tridiag`] is shared by the Jacobi-matrix eigensolver and the dense
//! Hermitian eigensolver in [`dense`].

pub mod dense;
pub mod gram;
pub mod lstsq;
pub mod tridiag;

use num_complex::Complex64;
use std::ops::{Index, IndexMut};

use crate::error::{KrylovError, Result};

pub use dense::{eig_hermitian_dense, HermitianEigen};
pub use gram::orthonormalize;
pub use tridiag::{eig_tridiagonal, eig_tridiagonal_full, TridiagonalEigen};

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

/// Hermitian inner product `<x|y> = sum conj(x_i) y_i`.
pub fn vdot(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(x: &[C64]) -> f64 {
    x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// `y += alpha * x`
pub fn axpy(alpha: C64, x: &[C64], y: &mut [C64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub fn sub(x: &[C64], y: &[C64]) -> Vec<C64> {
    x.iter().zip(y).map(|(a, b)| a - b).collect()
}

pub fn distance(x: &[C64], y: &[C64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b).norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Dense complex matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMatrix {
            rows,
            cols,
            data: vec![ZERO; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = C64::new(d, 0.0);
        }
        m
    }

    /// Builds a matrix from nested rows. All rows must share one length.
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for row in rows {
            if row.len() != n_cols {
                return Err(KrylovError::DimensionMismatch {
                    expected: n_cols,
                    found: row.len(),
                });
            }
            data.extend(row);
        }
        Ok(CMatrix {
            rows: n_rows,
            cols: n_cols,
            data,
        })
    }

    /// Builds a matrix whose `j`-th column is `columns[j]`.
    pub fn from_columns(columns: &[Vec<C64>]) -> Result<Self> {
        let cols = columns.len();
        let rows = columns.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows, cols);
        for (j, col) in columns.iter().enumerate() {
            if col.len() != rows {
                return Err(KrylovError::DimensionMismatch {
                    expected: rows,
                    found: col.len(),
                });
            }
            for (i, v) in col.iter().enumerate() {
                m[(i, j)] = *v;
            }
        }
        Ok(m)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<C64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn matmul(&self, other: &CMatrix) -> Result<CMatrix> {
        if self.cols != other.rows {
            return Err(KrylovError::DimensionMismatch {
                expected: self.cols,
                found: other.rows,
            });
        }
        let mut out = CMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let aik = self[(i, k)];
                if aik == ZERO {
                    continue;
                }
                let orow = other.row(k);
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, o) in dst.iter_mut().zip(orow) {
                    *d += aik * o;
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> CMatrix {
        let mut out = CMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// Maximum absolute row sum (the induced infinity norm).
    pub fn max_row_sum(&self) -> f64 {
        (0..self.rows)
            .map(|i| self.row(i).iter().map(|v| v.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    /// Largest entrywise deviation `|M_ij - conj(M_ji)|`.
    pub fn hermitian_deviation(&self) -> f64 {
        let mut dev = 0.0f64;
        for i in 0..self.rows.min(self.cols) {
            for j in i..self.cols.min(self.rows) {
                dev = dev.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn frobenius_distance(&self, other: &CMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = C64;
    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

/// A validated Hermitian operator `H`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    matrix: CMatrix,
    scale: f64,
}

/// Checks `M = M^dagger` to `1e-12 * max|M_ij|` and wraps it.
pub fn assert_hermitian(matrix: CMatrix) -> Result<HermitianOperator> {
    if !matrix.is_square() {
        return Err(KrylovError::NotSquare {
            rows: matrix.rows(),
            cols: matrix.cols(),
        });
    }
    if matrix.rows() == 0 {
        return Err(KrylovError::InvalidArgument(
            "operator dimension must be at least 1".into(),
        ));
    }
    let deviation = matrix.hermitian_deviation();
    if deviation > 1e-12 * matrix.max_abs() {
        return Err(KrylovError::NotHermitian {
            max_deviation: deviation,
        });
    }
    let scale = matrix.max_row_sum();
    Ok(HermitianOperator { matrix, scale })
}

impl HermitianOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        assert_hermitian(matrix)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        assert_hermitian(CMatrix::from_real_diagonal(values))
    }

    /// Real symmetric tridiagonal operator with on-site terms `onsite` and
    /// hopping terms `hopping` (length `onsite.len() - 1`).
    pub fn tight_binding(onsite: &[f64], hopping: &[f64]) -> Result<Self> {
        let n = onsite.len();
        if n == 0 || hopping.len() + 1 != n {
            return Err(KrylovError::DimensionMismatch {
                expected: n.saturating_sub(1),
                found: hopping.len(),
            });
        }
        let mut m = CMatrix::from_real_diagonal(onsite);
        for (i, &h) in hopping.iter().enumerate() {
            m[(i, i + 1)] = C64::new(h, 0.0);
            m[(i + 1, i)] = C64::new(h, 0.0);
        }
        assert_hermitian(m)
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// `||H||` as the maximum absolute row sum; the scale every relative
    /// tolerance is measured against.
    pub fn norm(&self) -> f64 {
        self.scale
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.matrix.matvec(x)
    }

    pub fn expectation(&self, x: &[C64]) -> f64 {
        vdot(x, &self.apply(x)).re
    }
}

/// A unit-norm state. Normalization is applied on construction.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector(Vec<C64>);

impl StateVector {
    pub fn new(amplitudes: Vec<C64>) -> Result<Self> {
        let n = norm(&amplitudes);
        if amplitudes.is_empty() || n == 0.0 || !n.is_finite() {
            return Err(KrylovError::ZeroState);
        }
        Ok(StateVector(amplitudes.into_iter().map(|v| v / n).collect()))
    }

    pub fn from_real(amplitudes: &[f64]) -> Result<Self> {
        Self::new(amplitudes.iter().map(|&v| C64::new(v, 0.0)).collect())
    }

    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        if index >= dim {
            return Err(KrylovError::IndexOutOfRange {
                index,
                max: dim.saturating_sub(1),
            });
        }
        let mut v = vec![ZERO; dim];
        v[index] = ONE;
        Ok(StateVector(v))
    }

    pub fn uniform(dim: usize) -> Result<Self> {
        Self::new(vec![ONE; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<C64> {
        self.0
    }
}

impl AsRef<[C64]> for StateVector {
    fn as_ref(&self) -> &[C64] {
        &self.0
    }
}

/// Real symmetric tridiagonal matrix with strictly positive off-diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalReal {
    diag: Vec<f64>,
    offdiag: Vec<f64>,
}

impl TridiagonalReal {
    pub fn new(diag: Vec<f64>, offdiag: Vec<f64>) -> Result<Self> {
        if diag.is_empty() {
            return Err(KrylovError::InvalidTridiagonal("empty diagonal".into()));
        }
        if offdiag.len() + 1 != diag.len() {
            return Err(KrylovError::InvalidTridiagonal(format!(
                "off-diagonal length {} does not match diagonal length {}",
                offdiag.len(),
                diag.len()
            )));
        }
        if let Some(pos) = offdiag.iter().position(|&b| !(b > 0.0)) {
            return Err(KrylovError::InvalidTridiagonal(format!(
                "off-diagonal entry {pos} is not strictly positive ({})",
                offdiag[pos]
            )));
        }
        if diag.iter().chain(&offdiag).any(|v| !v.is_finite()) {
            return Err(KrylovError::InvalidTridiagonal("non-finite entry".into()));
        }
        Ok(TridiagonalReal { diag, offdiag })
    }

    pub fn dim(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[f64] {
        &self.diag
    }

    pub fn offdiag(&self) -> &[f64] {
        &self.offdiag
    }

    pub fn to_dense(&self) -> CMatrix {
        let mut m = CMatrix::from_real_diagonal(&self.diag);
        for (i, &b) in self.offdiag.iter().enumerate() {
            m[(i, i + 1)] = C64::new(b, 0.0);
            m[(i + 1, i)] = C64::new(b, 0.0);
        }
        m
    }

    pub fn matvec(&self, x: &[C64]) -> Vec<C64> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut acc = x[i] * self.diag[i];
                if i > 0 {
                    acc += x[i - 1] * self.offdiag[i - 1];
                }
                if i + 1 < n {
                    acc += x[i + 1] * self.offdiag[i];
                }
                acc
            })
            .collect()
    }
}
