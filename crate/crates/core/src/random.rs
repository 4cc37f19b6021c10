//! Seeded random instances. Every generator takes an explicit seed and uses
//! ChaCha8, so instances are reproducible across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::Result;
use crate::linalg::{CMatrix, HermitianOperator, StateVector, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// `(X + X^dag) / sqrt(2 dim) + shift * I` with complex Gaussian `X`.
pub fn random_hermitian(dim: usize, seed: u64, shift: f64) -> Result<HermitianOperator> {
    let mut r = rng(seed);
    let mut x = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            x[(i, j)] = complex_gaussian(&mut r);
        }
    }
    let scale = 1.0 / (2.0 * dim as f64).sqrt();
    let mut h = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        for j in 0..dim {
            h[(i, j)] = (x[(i, j)] + x[(j, i)].conj()) * scale;
        }
        h[(i, i)] = C64::new(h[(i, i)].re + shift, 0.0);
    }
    HermitianOperator::new(h)
}

/// Normalized complex Gaussian vector.
pub fn random_state(dim: usize, seed: u64) -> Result<StateVector> {
    let mut r = rng(seed);
    StateVector::new((0..dim).map(|_| complex_gaussian(&mut r)).collect())
}

/// Haar-like unitary from Gram-Schmidt on a complex Gaussian matrix;
/// columns are the orthonormal vectors.
pub fn random_unitary(dim: usize, seed: u64) -> Result<CMatrix> {
    let mut r = rng(seed);
    let cols: Vec<Vec<C64>> = (0..dim)
        .map(|_| (0..dim).map(|_| complex_gaussian(&mut r)).collect())
        .collect();
    let (q, _) = crate::linalg::orthonormalize(&cols, 1e-12)?;
    CMatrix::from_columns(&q)
}

/// `U diag(eigenvalues) U^dag` with a random unitary `U`.
pub fn hermitian_with_spectrum(eigenvalues: &[f64], seed: u64) -> Result<HermitianOperator> {
    let u = random_unitary(eigenvalues.len(), seed)?;
    let d = CMatrix::from_real_diagonal(eigenvalues);
    let mut h = u.matmul(&d)?.matmul(&u.adjoint())?;
    // Exact symmetrization removes roundoff asymmetry.
    let n = eigenvalues.len();
    for i in 0..n {
        for j in i..n {
            let v = 0.5 * (h[(i, j)] + h[(j, i)].conj());
            h[(i, j)] = v;
            h[(j, i)] = v.conj();
        }
    }
    HermitianOperator::new(h)
}

/// `count` values drawn uniformly from `[lo, hi]`.
pub fn uniform_values(count: usize, lo: f64, hi: f64, seed: u64) -> Vec<f64> {
    let mut r = rng(seed);
    (0..count).map(|_| r.gen_range(lo..=hi)).collect()
}

/// `count` complex values with real and imaginary parts in `[-1, 1]`.
pub fn tabulated_values(count: usize, seed: u64) -> Vec<C64> {
    let mut r = rng(seed);
    (0..count)
        .map(|_| C64::new(r.gen_range(-1.0..=1.0), r.gen_range(-1.0..=1.0)))
        .collect()
}
