//! Dense Hermitian eigensolver.
//!
//! Householder reduction to Hermitian tridiagonal form, a diagonal phase
//! similarity to make the off-diagonal real and nonnegative, then the shared
//! QL kernel. Used as the brute-force oracle and for the state-oblivious
//! spectrum.

use super::tridiag::{identity, tql2};
use super::{vdot, CMatrix, HermitianOperator, C64, ONE, ZERO};
use crate::error::Result;

#[derive(Clone, Debug)]
pub struct HermitianEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Unitary matrix whose columns are the eigenvectors.
    pub vectors: CMatrix,
}

impl HermitianEigen {
    pub fn vector(&self, k: usize) -> Vec<C64> {
        self.vectors.column(k)
    }

    /// `U diag(g(lambda)) U^dagger x` for a scalar function `g`.
    pub fn apply_function<F>(&self, g: F, x: &[C64]) -> Vec<C64>
    where
        F: Fn(f64) -> C64,
    {
        let n = self.values.len();
        let mut out = vec![ZERO; n];
        for k in 0..n {
            let col = self.vectors.column(k);
            let coeff = g(self.values[k]) * vdot(&col, x);
            for (o, c) in out.iter_mut().zip(&col) {
                *o += coeff * c;
            }
        }
        out
    }

    /// Dense `U diag(g(lambda)) U^dagger`.
    pub fn function_matrix<F>(&self, g: F) -> CMatrix
    where
        F: Fn(f64) -> C64,
    {
        let n = self.values.len();
        let mut out = CMatrix::zeros(n, n);
        for k in 0..n {
            let gk = g(self.values[k]);
            for i in 0..n {
                let uik = self.vectors[(i, k)] * gk;
                for j in 0..n {
                    out[(i, j)] += uik * self.vectors[(j, k)].conj();
                }
            }
        }
        out
    }
}

pub fn eig_hermitian_dense(h: &HermitianOperator) -> Result<HermitianEigen> {
    let n = h.dim();
    let mut a = h.matrix().clone();
    let mut q = CMatrix::identity(n);

    for k in 0..n.saturating_sub(2) {
        let x: Vec<C64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let x_norm = x.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if x_norm == 0.0 {
            continue;
        }
        let phase = if x[0].norm() > 0.0 {
            x[0] / x[0].norm()
        } else {
            ONE
        };
        let alpha = -phase * x_norm;
        let mut u = vec![ZERO; n];
        for (i, xi) in x.iter().enumerate() {
            u[k + 1 + i] = *xi;
        }
        u[k + 1] -= alpha;
        let u_norm = u.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        if u_norm == 0.0 {
            continue;
        }
        for ui in u.iter_mut() {
            *ui /= u_norm;
        }

        // A <- (I - 2uu^dag) A (I - 2uu^dag) as a rank-two update.
        let p = a.matvec(&u);
        let kappa = vdot(&u, &p).re;
        let w: Vec<C64> = p.iter().zip(&u).map(|(pi, ui)| pi - ui * kappa).collect();
        for i in 0..n {
            for j in 0..n {
                a[(i, j)] -= 2.0 * (u[i] * w[j].conj() + w[i] * u[j].conj());
            }
        }

        // Q <- Q (I - 2uu^dag)
        let qu = q.matvec(&u);
        for i in 0..n {
            for j in 0..n {
                q[(i, j)] -= 2.0 * qu[i] * u[j].conj();
            }
        }
    }

    let mut d: Vec<f64> = (0..n).map(|i| a[(i, i)].re).collect();
    let mut e = vec![0.0; n];
    let mut phases = vec![ONE; n];
    for k in 0..n.saturating_sub(1) {
        let sub = a[(k + 1, k)];
        let mag = sub.norm();
        e[k] = mag;
        phases[k + 1] = if mag > 0.0 {
            phases[k] * sub / mag
        } else {
            phases[k]
        };
    }

    let mut z = identity(n);
    tql2(&mut d, &mut e, &mut z, n)?;

    // Eigenvectors of the original matrix: Q * D * Z.
    let mut vectors = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let qd = q[(i, j)] * phases[j];
            if qd == ZERO {
                continue;
            }
            for col in 0..n {
                vectors[(i, col)] += qd * z[j * n + col];
            }
        }
    }

    Ok(HermitianEigen { values: d, vectors })
}
