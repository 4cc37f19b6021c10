//! Spectral measure of `(H, psi0)` and its transforms.
//!
//! The measure is finite: atoms at the eigenvalues of the Jacobi matrix,
//! weights equal to the squared first components of its unit eigenvectors.

use serde::Serialize;

use crate::error::{KrylovError, Result};
use crate::lanczos::{lanczos_decompose, KrylovDecomposition};
use crate::linalg::{eig_tridiagonal, HermitianOperator, StateVector, C64};

/// Atoms closer than `ATOM_MERGE_REL * spectral_radius` are merged.
pub const ATOM_MERGE_REL: f64 = 1e-10;
/// `z` closer than `POLE_REL * spectral_radius` to an atom is rejected.
pub const POLE_REL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiscreteMeasure {
    atoms: Vec<f64>,
    weights: Vec<f64>,
}

impl DiscreteMeasure {
    /// Validating constructor: atoms strictly ascending, weights
    /// nonnegative and summing to one within `1e-12`.
    pub fn new(atoms: Vec<f64>, weights: Vec<f64>) -> Result<Self> {
        if atoms.is_empty() || atoms.len() != weights.len() {
            return Err(KrylovError::InvalidMeasure(format!(
                "{} atoms with {} weights",
                atoms.len(),
                weights.len()
            )));
        }
        if atoms.iter().chain(&weights).any(|v| !v.is_finite()) {
            return Err(KrylovError::InvalidMeasure("non-finite entry".into()));
        }
        if weights.iter().any(|&w| w < 0.0) {
            return Err(KrylovError::InvalidMeasure("negative weight".into()));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(KrylovError::InvalidMeasure(format!(
                "weights sum to {total}, not 1"
            )));
        }
        if atoms.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(KrylovError::InvalidMeasure(
                "atoms are not strictly ascending".into(),
            ));
        }
        Ok(DiscreteMeasure { atoms, weights })
    }

    /// Sorts the points, drops zero weights and merges atoms closer than
    /// `1e-10 * spectral_radius` (weights summed, atom at the weighted mean).
    pub fn from_points(atoms: &[f64], weights: &[f64]) -> Result<Self> {
        if atoms.len() != weights.len() {
            return Err(KrylovError::DimensionMismatch {
                expected: atoms.len(),
                found: weights.len(),
            });
        }
        let mut pts: Vec<(f64, f64)> = atoms
            .iter()
            .copied()
            .zip(weights.iter().copied())
            .filter(|&(_, w)| w != 0.0)
            .collect();
        pts.sort_by(|x, y| x.0.total_cmp(&y.0));
        let radius = pts.iter().map(|p| p.0.abs()).fold(0.0, f64::max);
        let merge_tol = ATOM_MERGE_REL * radius;

        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(pts.len());
        for (x, w) in pts {
            match merged.last_mut() {
                Some(last) if x - last.0 <= merge_tol => {
                    let total = last.1 + w;
                    if total > 0.0 {
                        last.0 = (last.0 * last.1 + x * w) / total;
                    }
                    last.1 = total;
                }
                _ => merged.push((x, w)),
            }
        }
        let (atoms, weights) = merged.into_iter().unzip();
        Self::new(atoms, weights)
    }

    pub fn atoms(&self) -> &[f64] {
        &self.atoms
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn spectral_radius(&self) -> f64 {
        self.atoms.iter().map(|a| a.abs()).fold(0.0, f64::max)
    }

    fn tolerance_scale(&self) -> f64 {
        self.spectral_radius().max(f64::MIN_POSITIVE)
    }

    /// `sum_i w_i g(lambda_i)`.
    pub fn integrate<F: Fn(f64) -> C64>(&self, g: F) -> C64 {
        self.atoms
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| g(x) * w)
            .sum()
    }

    pub fn moment(&self, k: u32) -> f64 {
        self.atoms
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * x.powi(k as i32))
            .sum()
    }

    /// `S(t) = sum_i w_i exp(-i lambda_i t) = <psi0| exp(-iHt) |psi0>`.
    pub fn survival_amplitude(&self, t: f64) -> C64 {
        self.integrate(|x| C64::from_polar(1.0, -x * t))
    }

    /// `Z(beta) = sum_i w_i exp(-beta lambda_i)`.
    pub fn partition_function(&self, beta: f64) -> Result<f64> {
        let exponent = beta.abs() * self.spectral_radius();
        if exponent > 700.0 {
            return Err(KrylovError::OverflowGuard { exponent });
        }
        Ok(self
            .atoms
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * (-beta * x).exp())
            .sum())
    }

    /// `G(z) = sum_i w_i / (z - lambda_i)`.
    pub fn greens_function_sum(&self, z: C64) -> Result<C64> {
        let pole_tol = POLE_REL * self.tolerance_scale();
        for (i, &x) in self.atoms.iter().enumerate() {
            if (z - x).norm() < pole_tol {
                return Err(KrylovError::PoleProximity { atom: i });
            }
        }
        Ok(self
            .atoms
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| C64::new(w, 0.0) / (z - x))
            .sum())
    }

    /// Uniform mixture `(1/r) sum_j mu_j`.
    pub fn mixture(members: &[&DiscreteMeasure]) -> Result<Self> {
        if members.is_empty() {
            return Err(KrylovError::InvalidMeasure("empty mixture".into()));
        }
        let r = members.len() as f64;
        let mut atoms = Vec::new();
        let mut weights = Vec::new();
        for mu in members {
            atoms.extend_from_slice(&mu.atoms);
            weights.extend(mu.weights.iter().map(|w| w / r));
        }
        let total: f64 = weights.iter().sum();
        for w in weights.iter_mut() {
            *w /= total;
        }
        Self::from_points(&atoms, &weights)
    }

    /// Recurrence coefficients `(a, b)` of the orthonormal polynomials of
    /// this measure, by Lanczos on `diag(atoms)` started from `sqrt(w)`.
    pub fn jacobi_coefficients(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let h = HermitianOperator::diagonal(&self.atoms)?;
        let start = StateVector::from_real(
            &self.weights.iter().map(|w| w.sqrt()).collect::<Vec<_>>(),
        )?;
        let k = lanczos_decompose(&h, &start, None)?;
        Ok((k.a().to_vec(), k.b().to_vec()))
    }

    /// Support diagnostics between two measures; atoms are paired in
    /// ascending order.
    pub fn distance(&self, other: &DiscreteMeasure) -> MeasureDistance {
        let paired = self.len().min(other.len());
        let max_atom_shift = (0..paired)
            .map(|i| (self.atoms[i] - other.atoms[i]).abs())
            .fold(0.0, f64::max);
        let mut tv = 0.0;
        for i in 0..self.len().max(other.len()) {
            let a = self.weights.get(i).copied().unwrap_or(0.0);
            let b = other.weights.get(i).copied().unwrap_or(0.0);
            tv += (a - b).abs();
        }
        MeasureDistance {
            max_atom_shift,
            weight_total_variation: 0.5 * tv,
            atom_count_delta: other.len() as i64 - self.len() as i64,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MeasureDistance {
    pub max_atom_shift: f64,
    pub weight_total_variation: f64,
    pub atom_count_delta: i64,
}

/// Atoms are the eigenvalues of `J`; weights the squared first components.
pub fn measure_from_decomposition(k: &KrylovDecomposition) -> Result<DiscreteMeasure> {
    let (values, first) = eig_tridiagonal(k.jacobi())?;
    let weights: Vec<f64> = first.iter().map(|c| c * c).collect();
    DiscreteMeasure::from_points(&values, &weights)
}

/// Finite continued fraction
/// `1 / (z - a_0 - b_1^2 / (z - a_1 - b_2^2 / (...)))` truncated at `depth`
/// levels, evaluated bottom-up. `b[k]` is `b_{k+1}`.
pub fn greens_function_cfrac(a: &[f64], b: &[f64], z: C64, depth: usize) -> Result<C64> {
    if depth == 0 || depth > a.len() {
        return Err(KrylovError::IndexOutOfRange {
            index: depth,
            max: a.len(),
        });
    }
    if b.len() + 1 < depth {
        return Err(KrylovError::DimensionMismatch {
            expected: depth - 1,
            found: b.len(),
        });
    }
    let mut denom = z - a[depth - 1];
    for n in (0..depth - 1).rev() {
        if denom.norm() < 1e-300 {
            return Err(KrylovError::ZeroDenominator { level: n + 1 });
        }
        denom = z - a[n] - b[n] * b[n] / denom;
    }
    if denom.norm() < 1e-300 {
        return Err(KrylovError::ZeroDenominator { level: 0 });
    }
    Ok(denom.inv())
}
