//! Householder QR least squares for a real design matrix and a complex
//! right-hand side.

use super::C64;
use crate::error::{KrylovError, Result};

#[derive(Clone, Debug)]
pub struct LeastSquares {
    pub coefficients: Vec<C64>,
    /// `min_x ||A x - b||_2`.
    pub residual_norm: f64,
    /// `max|R_kk| / min|R_kk|`; infinite when a pivot vanishes.
    pub condition_estimate: f64,
}

/// Solves `min ||A x - b||` for row-major `A` (`rows x cols`, `rows >= cols`).
pub fn solve(a: &[f64], rows: usize, cols: usize, b: &[C64]) -> Result<LeastSquares> {
    if a.len() != rows * cols {
        return Err(KrylovError::DimensionMismatch {
            expected: rows * cols,
            found: a.len(),
        });
    }
    if b.len() != rows {
        return Err(KrylovError::DimensionMismatch {
            expected: rows,
            found: b.len(),
        });
    }
    if cols > rows || cols == 0 {
        return Err(KrylovError::InvalidArgument(format!(
            "least squares needs 1 <= cols <= rows (got {rows}x{cols})"
        )));
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    let mut r_diag = vec![0.0; cols];

    for k in 0..cols {
        let col_norm = (k..rows).map(|i| a[i * cols + k].powi(2)).sum::<f64>().sqrt();
        if col_norm == 0.0 {
            r_diag[k] = 0.0;
            continue;
        }
        let x0 = a[k * cols + k];
        let alpha = if x0 >= 0.0 { -col_norm } else { col_norm };
        let mut v: Vec<f64> = (k..rows).map(|i| a[i * cols + k]).collect();
        v[0] -= alpha;
        let vtv: f64 = v.iter().map(|x| x * x).sum();
        if vtv == 0.0 {
            r_diag[k] = alpha;
            continue;
        }
        let beta = 2.0 / vtv;
        for j in k..cols {
            let s: f64 = v
                .iter()
                .enumerate()
                .map(|(t, vt)| vt * a[(k + t) * cols + j])
                .sum();
            let s = beta * s;
            for (t, vt) in v.iter().enumerate() {
                a[(k + t) * cols + j] -= s * vt;
            }
        }
        let s: C64 = v.iter().enumerate().map(|(t, vt)| b[k + t] * vt).sum();
        let s = s * beta;
        for (t, vt) in v.iter().enumerate() {
            b[k + t] -= s * vt;
        }
        r_diag[k] = a[k * cols + k];
    }

    let max_r = r_diag.iter().map(|r| r.abs()).fold(0.0, f64::max);
    let min_r = r_diag.iter().map(|r| r.abs()).fold(f64::INFINITY, f64::min);
    let condition_estimate = if min_r > 0.0 { max_r / min_r } else { f64::INFINITY };

    let residual_norm = b[cols..].iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();

    let mut x = vec![C64::new(0.0, 0.0); cols];
    if condition_estimate.is_finite() {
        for k in (0..cols).rev() {
            let mut acc = b[k];
            for j in k + 1..cols {
                acc -= x[j] * a[k * cols + j];
            }
            x[k] = acc / a[k * cols + k];
        }
    }

    Ok(LeastSquares {
        coefficients: x,
        residual_norm,
        condition_estimate,
    })
}
