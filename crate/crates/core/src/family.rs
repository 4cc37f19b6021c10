//! Joint Krylov space of a family of initial states.
//!
//! The family basis is the orthonormalized union of the individual Krylov
//! bases. The compressed operator `V^dag H V` is banded rather than
//! tridiagonal and is kept in that form.

use rayon::prelude::*;
use serde::Serialize;

use crate::duality::{degree_functional, weighted_polynomial_fit, OracleBasis, StateAwareQuery};
use crate::error::{KrylovError, Result};
use crate::favard::{expand, TargetFunction};
use crate::lanczos::{lanczos_decompose, KrylovDecomposition};
use crate::linalg::gram::project_out;
use crate::linalg::{norm, orthonormalize, vdot, CMatrix, HermitianOperator, StateVector, C64};
use crate::measure::{measure_from_decomposition, DiscreteMeasure};

pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Frank-Wolfe iterations spent deciding one degree in the max-state search.
const MINIMAX_ITERATIONS: usize = 400;

#[derive(Clone, Debug)]
pub struct StateFamily {
    states: Vec<StateVector>,
}

impl StateFamily {
    pub fn new(states: Vec<StateVector>) -> Result<Self> {
        let first = states
            .first()
            .ok_or_else(|| KrylovError::InvalidArgument("a family needs at least one state".into()))?
            .dim();
        if let Some(s) = states.iter().find(|s| s.dim() != first) {
            return Err(KrylovError::DimensionMismatch {
                expected: first,
                found: s.dim(),
            });
        }
        Ok(StateFamily { states })
    }

    pub fn states(&self) -> &[StateVector] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }
}

#[derive(Clone, Debug)]
pub struct FamilyDecomposition {
    pub basis: Vec<Vec<C64>>,
    /// `V^dag H V` on the family basis.
    pub compressed: CMatrix,
    /// Individual Krylov dimensions `m_j`.
    pub per_state_dims: Vec<usize>,
    pub members: Vec<KrylovDecomposition>,
}

impl FamilyDecomposition {
    pub fn m_fam(&self) -> usize {
        self.basis.len()
    }

    /// Norm of the component of `x` outside the family span.
    pub fn span_residual(&self, x: &[C64]) -> f64 {
        let mut w = x.to_vec();
        project_out(&self.basis, &mut w);
        project_out(&self.basis, &mut w);
        norm(&w)
    }
}

fn member_decompositions(h: &HermitianOperator, fam: &StateFamily) -> Result<Vec<KrylovDecomposition>> {
    if fam.dim() != h.dim() {
        return Err(KrylovError::DimensionMismatch {
            expected: h.dim(),
            found: fam.dim(),
        });
    }
    fam.states()
        .par_iter()
        .map(|psi| lanczos_decompose(h, psi, None))
        .collect()
}

/// Joint Krylov basis and compressed operator.
///
/// A one-member family keeps its Lanczos basis, and its compressed matrix
/// is the Jacobi matrix itself.
pub fn family_decompose(
    h: &HermitianOperator,
    fam: &StateFamily,
    rank_tol: f64,
) -> Result<FamilyDecomposition> {
    let members = member_decompositions(h, fam)?;
    let per_state_dims = members.iter().map(|k| k.m()).collect();
    if members.len() == 1 {
        return Ok(FamilyDecomposition {
            basis: members[0].basis().to_vec(),
            compressed: members[0].jacobi().to_dense(),
            per_state_dims,
            members,
        });
    }
    let union: Vec<Vec<C64>> = members.iter().flat_map(|k| k.basis().iter().cloned()).collect();
    let basis = orthonormalize(&union, rank_tol)?.0;
    let images: Vec<Vec<C64>> = basis.iter().map(|v| h.apply(v)).collect();
    let m = basis.len();
    let mut compressed = CMatrix::zeros(m, m);
    for i in 0..m {
        for (j, img) in images.iter().enumerate() {
            compressed[(i, j)] = vdot(&basis[i], img);
        }
    }
    Ok(FamilyDecomposition {
        basis,
        compressed,
        per_state_dims,
        members,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyCriterion {
    /// One polynomial whose error is at most `eps` for every member.
    #[default]
    MaxState,
    /// `n_mu` of the uniform mixture of the member measures.
    Averaged,
}

/// Query complexity of preparing `f(H)|psi_j>` for every member with one
/// polynomial of `H`.
pub fn family_query_complexity(
    h: &HermitianOperator,
    fam: &StateFamily,
    f: &TargetFunction,
    epsilon: f64,
    criterion: FamilyCriterion,
) -> Result<usize> {
    if !(epsilon >= 0.0) {
        return Err(KrylovError::InvalidArgument(format!(
            "epsilon must be nonnegative, got {epsilon}"
        )));
    }
    if fam.len() == 1 {
        let query = StateAwareQuery::new(h, &fam.states()[0])?;
        let exp = query.expand(f)?;
        return Ok(degree_functional(&exp, epsilon));
    }
    let measures: Vec<DiscreteMeasure> = member_decompositions(h, fam)?
        .iter()
        .map(measure_from_decomposition)
        .collect::<Result<_>>()?;
    // Surfaces target errors such as SingularAtom before any fitting.
    let values: Vec<Vec<C64>> = measures.iter().map(|mu| f.values_on(mu)).collect::<Result<_>>()?;

    let refs: Vec<&DiscreteMeasure> = measures.iter().collect();
    let mix = DiscreteMeasure::mixture(&refs)?;
    if criterion == FamilyCriterion::Averaged || epsilon == 0.0 {
        // At eps = 0 a single polynomial must interpolate on the union of
        // supports, which is the support of the mixture.
        if matches!(f, TargetFunction::Tabulated { .. }) {
            return Err(KrylovError::UnsupportedTarget);
        }
        let (a, b) = mix.jacobi_coefficients()?;
        let exp = expand(f, &mix, &a, &b)?;
        return Ok(degree_functional(&exp, epsilon));
    }
    max_state_degree(&measures, &values, mix.len(), epsilon)
}

/// Smallest `d` with `min_p max_j ||f - p||_{mu_j} <= eps`.
fn max_state_degree(
    measures: &[DiscreteMeasure],
    values: &[Vec<C64>],
    union_atoms: usize,
    epsilon: f64,
) -> Result<usize> {
    for d in 0..union_atoms.saturating_sub(1) {
        if minimax_feasible(measures, values, d, epsilon)? {
            return Ok(d);
        }
    }
    Ok(union_atoms.saturating_sub(1))
}

/// Decides `min_p max_j ||f - p||_{mu_j} <= eps` over degree-`d` polynomials.
///
/// The squared problem is the saddle point
/// `max_theta min_p sum_j theta_j ||f - p||_j^2` over the simplex. Frank-Wolfe
/// on `theta` gives a lower bound `sqrt(g(theta))` and an upper bound
/// `max_j ||f - p_theta||_j`. An undecided instance counts as infeasible.
fn minimax_feasible(
    measures: &[DiscreteMeasure],
    values: &[Vec<C64>],
    d: usize,
    epsilon: f64,
) -> Result<bool> {
    let r = measures.len();
    let mut atoms = Vec::new();
    let mut owner = Vec::new();
    let mut all_values = Vec::new();
    let mut base_weights = Vec::new();
    for (j, (mu, v)) in measures.iter().zip(values).enumerate() {
        atoms.extend_from_slice(mu.atoms());
        base_weights.extend_from_slice(mu.weights());
        owner.extend(std::iter::repeat(j).take(mu.len()));
        all_values.extend_from_slice(v);
    }
    let (lo, hi) = hull(&atoms);
    let mut theta = vec![1.0 / r as f64; r];
    for it in 0..MINIMAX_ITERATIONS {
        let weights: Vec<f64> = owner
            .iter()
            .zip(&base_weights)
            .map(|(&j, &w)| theta[j] * w)
            .collect();
        let fit = weighted_polynomial_fit(&atoms, &weights, &all_values, d, OracleBasis::Chebyshev)?;
        let mut err_sq = vec![0.0; r];
        for (i, &x) in atoms.iter().enumerate() {
            let row = crate::duality::basis_row(x, lo, hi, d + 1, OracleBasis::Chebyshev);
            let p: C64 = row.iter().zip(&fit.coefficients).map(|(b, c)| c * b).sum();
            err_sq[owner[i]] += base_weights[i] * (all_values[i] - p).norm_sqr();
        }
        let lower = fit.residual_norm;
        let (worst, upper_sq) = err_sq
            .iter()
            .copied()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (j, e)| if e > acc.1 { (j, e) } else { acc });
        let upper = upper_sq.max(0.0).sqrt();
        if upper <= epsilon {
            return Ok(true);
        }
        if lower > epsilon {
            return Ok(false);
        }
        let gamma = (2.0 / (it as f64 + 2.0)).min(0.999);
        for (j, t) in theta.iter_mut().enumerate() {
            *t *= 1.0 - gamma;
            if j == worst {
                *t += gamma;
            }
        }
    }
    Ok(false)
}

fn hull(atoms: &[f64]) -> (f64, f64) {
    let lo = atoms.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = atoms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}
