//! Repeated (two-pass) Gram-Schmidt with rank detection.

use super::{axpy, norm, vdot, C64};
use crate::error::{KrylovError, Result};

/// Orthonormalizes `vectors` in order.
///
/// Each candidate is projected against the accepted basis twice. A candidate
/// whose residual norm falls below `rank_tol * max_input_norm` is dropped.
/// Returns the basis and its rank.
pub fn orthonormalize(vectors: &[Vec<C64>], rank_tol: f64) -> Result<(Vec<Vec<C64>>, usize)> {
    let largest = vectors.iter().map(|v| norm(v)).fold(0.0, f64::max);
    if vectors.is_empty() || largest == 0.0 {
        return Err(KrylovError::EmptySpan);
    }
    let threshold = rank_tol * largest;
    let mut basis: Vec<Vec<C64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        project_out(&basis, &mut w);
        project_out(&basis, &mut w);
        let r = norm(&w);
        if r < threshold || r == 0.0 {
            continue;
        }
        for x in w.iter_mut() {
            *x /= r;
        }
        basis.push(w);
    }
    if basis.is_empty() {
        return Err(KrylovError::EmptySpan);
    }
    let rank = basis.len();
    Ok((basis, rank))
}

/// One classical Gram-Schmidt sweep: `w -= sum_q q <q|w>`.
pub(crate) fn project_out(basis: &[Vec<C64>], w: &mut [C64]) {
    let coeffs: Vec<C64> = basis.iter().map(|q| vdot(q, w)).collect();
    for (q, c) in basis.iter().zip(coeffs) {
        axpy(-c, q, w);
    }
}

/// Largest off-diagonal magnitude of the Gram matrix minus identity.
pub fn gram_deviation(basis: &[Vec<C64>]) -> f64 {
    let mut dev = 0.0f64;
    for (i, a) in basis.iter().enumerate() {
        for (j, b) in basis.iter().enumerate().skip(i) {
            let g = vdot(a, b);
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((g - target).norm());
        }
    }
    dev
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(v: &[f64]) -> Vec<C64> {
        v.iter().map(|&x| C64::new(x, 0.0)).collect()
    }

    #[test]
    fn standard_basis_kept() {
        let (b, rank) = orthonormalize(&[r(&[1., 0.]), r(&[0., 1.])], 1e-12).unwrap();
        assert_eq!(rank, 2);
        assert_eq!(b[0], r(&[1., 0.]));
        assert_eq!(b[1], r(&[0., 1.]));
    }

    #[test]
    fn dependent_vector_dropped() {
        let (b, rank) = orthonormalize(&[r(&[1., 0.]), r(&[2., 0.])], 1e-12).unwrap();
        assert_eq!(rank, 1);
        assert_eq!(b[0], r(&[1., 0.]));
    }

    #[test]
    fn third_vector_in_span() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let (b, rank) =
            orthonormalize(&[r(&[s, s]), r(&[s, -s]), r(&[1., 0.])], 1e-12).unwrap();
        assert_eq!(rank, 2);
        assert!(gram_deviation(&b) < 1e-15);
    }

    #[test]
    fn all_zero_is_empty_span() {
        assert_eq!(
            orthonormalize(&[r(&[0., 0.])], 1e-12),
            Err(KrylovError::EmptySpan)
        );
    }
}
