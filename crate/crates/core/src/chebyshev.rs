//! Chebyshev polynomials on an interval `[lo, hi]`: basis evaluation,
//! interpolation at first-kind nodes and Clenshaw summation.

use crate::error::Result;
use crate::linalg::{C64, ZERO};
use std::f64::consts::PI;

fn to_unit(x: f64, lo: f64, hi: f64) -> f64 {
    (2.0 * x - lo - hi) / (hi - lo)
}

/// `T_0(s), ..., T_{count-1}(s)` with `s` the image of `x` in `[-1, 1]`.
pub fn basis_values(x: f64, lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let s = to_unit(x, lo, hi);
    let mut out = Vec::with_capacity(count);
    if count > 0 {
        out.push(1.0);
    }
    if count > 1 {
        out.push(s);
    }
    for k in 2..count {
        let next = 2.0 * s * out[k - 1] - out[k - 2];
        out.push(next);
    }
    out
}

#[derive(Clone, Debug)]
pub struct ChebyshevInterpolant {
    lo: f64,
    hi: f64,
    coeffs: Vec<C64>,
}

impl ChebyshevInterpolant {
    /// Degree-`degree` interpolant of `f` at the `degree + 1` Chebyshev
    /// points of the first kind.
    pub fn fit<F>(f: F, lo: f64, hi: f64, degree: usize) -> Result<Self>
    where
        F: Fn(f64) -> Result<C64>,
    {
        let n = degree + 1;
        let nf = n as f64;
        let mut samples = Vec::with_capacity(n);
        for k in 0..n {
            let theta = PI * (k as f64 + 0.5) / nf;
            let x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * theta.cos();
            samples.push(f(x)?);
        }
        let coeffs = (0..n)
            .map(|j| {
                let s: C64 = samples
                    .iter()
                    .enumerate()
                    .map(|(k, fk)| fk * (PI * j as f64 * (k as f64 + 0.5) / nf).cos())
                    .sum();
                let scale = if j == 0 { 1.0 / nf } else { 2.0 / nf };
                s * scale
            })
            .collect();
        Ok(ChebyshevInterpolant { lo, hi, coeffs })
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coefficients(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn eval(&self, x: f64) -> C64 {
        let s = to_unit(x, self.lo, self.hi);
        let mut b1 = ZERO;
        let mut b2 = ZERO;
        for c in self.coeffs.iter().skip(1).rev() {
            let b0 = c + b1 * (2.0 * s) - b2;
            b2 = b1;
            b1 = b0;
        }
        self.coeffs[0] + b1 * s - b2
    }
}
