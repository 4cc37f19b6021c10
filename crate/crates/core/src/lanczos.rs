//! Lanczos tridiagonalization with full reorthogonalization.
//!
//! Produces the Krylov basis `|K_0>, ..., |K_{m-1}>` of `(H, psi0)`, the
//! recurrence coefficients `a_n`, `b_n` and the Jacobi matrix `J = V^dag H V`.
//! Indexing is 0-based throughout: `basis[0]` is the normalized start state.

use crate::error::{KrylovError, Result};
use crate::linalg::gram::project_out;
use crate::linalg::{
    axpy, norm, vdot, CMatrix, HermitianOperator, StateVector, TridiagonalReal, C64, ZERO,
};

/// Relative breakdown tolerance: `b_n <= 1e-12 * ||H||` ends the recurrence.
pub const DEFAULT_BREAKDOWN_REL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct KrylovDecomposition {
    basis: Vec<Vec<C64>>,
    a: Vec<f64>,
    /// `b[k]` is `b_{k+1}`, the coupling between `K_k` and `K_{k+1}`.
    b: Vec<f64>,
    jacobi: TridiagonalReal,
    source_dim: usize,
}

/// Runs Lanczos from `psi0` until natural breakdown or until the basis fills
/// the ambient space. `breakdown_tol` defaults to `1e-12 * ||H||`.
pub fn lanczos_decompose(
    h: &HermitianOperator,
    psi0: &StateVector,
    breakdown_tol: Option<f64>,
) -> Result<KrylovDecomposition> {
    let dim = h.dim();
    if psi0.dim() != dim {
        return Err(KrylovError::DimensionMismatch {
            expected: dim,
            found: psi0.dim(),
        });
    }
    let tol = breakdown_tol.unwrap_or(DEFAULT_BREAKDOWN_REL * h.norm());
    if !(tol >= 0.0) {
        return Err(KrylovError::InvalidArgument(format!(
            "breakdown tolerance must be nonnegative, got {tol}"
        )));
    }

    let mut basis: Vec<Vec<C64>> = vec![psi0.as_slice().to_vec()];
    let mut a = Vec::new();
    let mut b: Vec<f64> = Vec::new();

    loop {
        let n = basis.len() - 1;
        let mut w = h.apply(&basis[n]);
        if n > 0 {
            axpy(C64::new(-b[n - 1], 0.0), &basis[n - 1], &mut w);
        }
        let a_n = vdot(&basis[n], &w).re;
        axpy(C64::new(-a_n, 0.0), &basis[n], &mut w);
        a.push(a_n);

        if basis.len() == dim {
            break;
        }
        project_out(&basis, &mut w);
        project_out(&basis, &mut w);
        let b_next = norm(&w);
        if b_next <= tol {
            break;
        }
        for x in w.iter_mut() {
            *x /= b_next;
        }
        b.push(b_next);
        basis.push(w);
    }

    let jacobi = TridiagonalReal::new(a.clone(), b.clone())?;
    Ok(KrylovDecomposition {
        basis,
        a,
        b,
        jacobi,
        source_dim: dim,
    })
}

/// Krylov dimension `m` of `(H, psi0)` at the default breakdown tolerance.
pub fn krylov_dimension(h: &HermitianOperator, psi0: &StateVector) -> Result<usize> {
    Ok(lanczos_decompose(h, psi0, None)?.m())
}

impl KrylovDecomposition {
    pub fn m(&self) -> usize {
        self.basis.len()
    }

    pub fn source_dim(&self) -> usize {
        self.source_dim
    }

    pub fn basis(&self) -> &[Vec<C64>] {
        &self.basis
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn jacobi(&self) -> &TridiagonalReal {
        &self.jacobi
    }

    /// `V v = sum_j v_j |K_j>`.
    pub fn apply_isometry(&self, v: &[C64]) -> Result<Vec<C64>> {
        if v.len() != self.m() {
            return Err(KrylovError::DimensionMismatch {
                expected: self.m(),
                found: v.len(),
            });
        }
        let mut out = vec![ZERO; self.source_dim];
        for (k, c) in self.basis.iter().zip(v) {
            axpy(*c, k, &mut out);
        }
        Ok(out)
    }

    /// `V^dag x`: coordinates of `x` in the Krylov basis.
    pub fn project(&self, x: &[C64]) -> Result<Vec<C64>> {
        if x.len() != self.source_dim {
            return Err(KrylovError::DimensionMismatch {
                expected: self.source_dim,
                found: x.len(),
            });
        }
        Ok(self.basis.iter().map(|k| vdot(k, x)).collect())
    }

    /// `V^dag A V` for an ambient-space observable.
    pub fn compress_observable(&self, obs: &HermitianOperator) -> Result<CMatrix> {
        self.compress_matrix(obs.matrix())
    }

    pub fn compress_matrix(&self, obs: &CMatrix) -> Result<CMatrix> {
        if obs.rows() != self.source_dim || obs.cols() != self.source_dim {
            return Err(KrylovError::DimensionMismatch {
                expected: self.source_dim,
                found: obs.rows(),
            });
        }
        let m = self.m();
        let images: Vec<Vec<C64>> = self.basis.iter().map(|k| obs.matvec(k)).collect();
        let mut out = CMatrix::zeros(m, m);
        for i in 0..m {
            for (j, img) in images.iter().enumerate() {
                out[(i, j)] = vdot(&self.basis[i], img);
            }
        }
        Ok(out)
    }

    /// Largest residual of `H|K_n> = a_n|K_n> + b_{n+1}|K_{n+1}> + b_n|K_{n-1}>`
    /// over all `n`, with the boundary terms taken as zero.
    pub fn recurrence_residual(&self, h: &HermitianOperator) -> f64 {
        let m = self.m();
        (0..m)
            .map(|n| {
                let mut r = h.apply(&self.basis[n]);
                axpy(C64::new(-self.a[n], 0.0), &self.basis[n], &mut r);
                if n + 1 < m {
                    axpy(C64::new(-self.b[n], 0.0), &self.basis[n + 1], &mut r);
                }
                if n > 0 {
                    axpy(C64::new(-self.b[n - 1], 0.0), &self.basis[n - 1], &mut r);
                }
                norm(&r)
            })
            .fold(0.0, f64::max)
    }
}
