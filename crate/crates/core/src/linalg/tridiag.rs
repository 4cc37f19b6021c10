//! Symmetric tridiagonal eigensolver: implicit-shift QL with eigenvector
//! accumulation (the EISPACK `tql2` scheme).

use super::TridiagonalReal;
use crate::error::{KrylovError, Result};

/// Full eigendecomposition of a real symmetric tridiagonal matrix.
///
/// `vectors` is row-major `m x m`; column `k` is the unit eigenvector for
/// `values[k]`. Values are ascending and every first component is
/// nonnegative.
#[derive(Clone, Debug, PartialEq)]
pub struct TridiagonalEigen {
    pub values: Vec<f64>,
    vectors: Vec<f64>,
    dim: usize,
}

impl TridiagonalEigen {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Component `i` of eigenvector `k`.
    pub fn component(&self, i: usize, k: usize) -> f64 {
        self.vectors[i * self.dim + k]
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.dim).map(|i| self.component(i, k)).collect()
    }

    pub fn first_components(&self) -> Vec<f64> {
        self.vectors[..self.dim].to_vec()
    }
}

/// Eigenvalues (ascending) and first eigenvector components of `J`.
///
/// The squared first components are the Gauss weights of the spectral
/// measure whose Jacobi matrix is `J`.
pub fn eig_tridiagonal(j: &TridiagonalReal) -> Result<(Vec<f64>, Vec<f64>)> {
    let eig = eig_tridiagonal_full(j)?;
    let first = eig.first_components();
    Ok((eig.values, first))
}

pub fn eig_tridiagonal_full(j: &TridiagonalReal) -> Result<TridiagonalEigen> {
    let n = j.dim();
    let mut d = j.diag().to_vec();
    let mut e = j.offdiag().to_vec();
    e.push(0.0);
    let mut z = identity(n);
    tql2(&mut d, &mut e, &mut z, n)?;
    normalize_signs(&mut z, n);
    Ok(TridiagonalEigen {
        values: d,
        vectors: z,
        dim: n,
    })
}

pub(crate) fn identity(n: usize) -> Vec<f64> {
    let mut z = vec![0.0; n * n];
    for i in 0..n {
        z[i * n + i] = 1.0;
    }
    z
}

fn normalize_signs(z: &mut [f64], n: usize) {
    for k in 0..n {
        if z[k] < 0.0 {
            for i in 0..n {
                z[i * n + k] = -z[i * n + k];
            }
        }
    }
}

/// Implicit-shift QL on `(d, e)`.
///
/// `e[i]` couples rows `i` and `i+1`; `e[n-1]` must be zero. Zero couplings
/// are allowed (the matrix may be reducible). Rotations are accumulated
/// into the row-major `n x n` matrix `z`. On return `d` holds the
/// eigenvalues in ascending order with matching columns of `z`.
///
/// Fails with `ConvergenceFailure` after `50 * n` QL sweeps in total.
pub(crate) fn tql2(d: &mut [f64], e: &mut [f64], z: &mut [f64], n: usize) -> Result<()> {
    debug_assert_eq!(d.len(), n);
    debug_assert_eq!(e.len(), n);
    if n == 0 {
        return Ok(());
    }
    let max_sweeps = 50 * n.max(1);
    let mut sweeps = 0usize;
    let eps = f64::EPSILON;
    let mut f = 0.0;
    let mut tst1 = 0.0f64;

    for l in 0..n {
        tst1 = tst1.max(d[l].abs() + e[l].abs());
        let mut m = l;
        while m < n - 1 {
            if e[m].abs() <= eps * tst1 {
                break;
            }
            m += 1;
        }

        if m > l {
            loop {
                sweeps += 1;
                if sweeps > max_sweeps {
                    return Err(KrylovError::ConvergenceFailure {
                        iterations: max_sweeps,
                    });
                }

                // Wilkinson-style shift from the leading 2x2 block.
                let g = d[l];
                let mut p = (d[l + 1] - g) / (2.0 * e[l]);
                let mut r = p.hypot(1.0);
                if p < 0.0 {
                    r = -r;
                }
                d[l] = e[l] / (p + r);
                d[l + 1] = e[l] * (p + r);
                let dl1 = d[l + 1];
                let mut h = g - d[l];
                for di in d.iter_mut().take(n).skip(l + 2) {
                    *di -= h;
                }
                f += h;

                p = d[m];
                let mut c = 1.0;
                let mut c2 = c;
                let mut c3 = c;
                let el1 = e[l + 1];
                let mut s = 0.0;
                let mut s2 = 0.0;
                for i in (l..m).rev() {
                    c3 = c2;
                    c2 = c;
                    s2 = s;
                    let g = c * e[i];
                    h = c * p;
                    r = p.hypot(e[i]);
                    e[i + 1] = s * r;
                    s = e[i] / r;
                    c = p / r;
                    p = c * d[i] - s * g;
                    d[i + 1] = h + s * (c * g + s * d[i]);
                    for k in 0..n {
                        let zk = k * n;
                        let h = z[zk + i + 1];
                        z[zk + i + 1] = s * z[zk + i] + c * h;
                        z[zk + i] = c * z[zk + i] - s * h;
                    }
                }
                p = -s * s2 * c3 * el1 * e[l] / dl1;
                e[l] = s * p;
                d[l] = c * p;

                if e[l].abs() <= eps * tst1 {
                    break;
                }
            }
        }
        d[l] += f;
        e[l] = 0.0;
    }

    // Selection sort into ascending order.
    for i in 0..n.saturating_sub(1) {
        let mut k = i;
        let mut p = d[i];
        for (j, &dj) in d.iter().enumerate().skip(i + 1) {
            if dj < p {
                k = j;
                p = dj;
            }
        }
        if k != i {
            d.swap(i, k);
            for row in 0..n {
                z.swap(row * n + i, row * n + k);
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_by_two_closed_form() {
        let j = TridiagonalReal::new(vec![0.0, 0.0], vec![1.0]).unwrap();
        let (vals, first) = eig_tridiagonal(&j).unwrap();
        assert!((vals[0] + 1.0).abs() < 1e-15);
        assert!((vals[1] - 1.0).abs() < 1e-15);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((first[0] - r).abs() < 1e-15);
        assert!((first[1] - r).abs() < 1e-15);
    }

    #[test]
    fn one_by_one() {
        let j = TridiagonalReal::new(vec![3.5], vec![]).unwrap();
        let (vals, first) = eig_tridiagonal(&j).unwrap();
        assert_eq!(vals, vec![3.5]);
        assert_eq!(first, vec![1.0]);
    }

    #[test]
    fn free_chain_matches_cosine_spectrum() {
        // Uniform hopping chain: eigenvalues 2 cos(k pi / (n + 1)).
        let n = 20;
        let j = TridiagonalReal::new(vec![0.0; n], vec![1.0; n - 1]).unwrap();
        let eig = eig_tridiagonal_full(&j).unwrap();
        let mut expected: Vec<f64> = (1..=n)
            .map(|k| 2.0 * (k as f64 * std::f64::consts::PI / (n as f64 + 1.0)).cos())
            .collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in eig.values.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-13, "{a} vs {b}");
        }
        let w: f64 = eig.first_components().iter().map(|c| c * c).sum();
        assert!((w - 1.0).abs() < 1e-13);
        assert!(eig.first_components().iter().all(|&c| c >= 0.0));
    }

    #[test]
    fn reducible_input_is_handled() {
        let mut d = vec![2.0, 1.0, 3.0];
        let mut e = vec![0.0, 0.0, 0.0];
        let mut z = identity(3);
        tql2(&mut d, &mut e, &mut z, 3).unwrap();
        assert_eq!(d, vec![1.0, 2.0, 3.0]);
    }
}
