//! Time evolution in the ambient space and on the Krylov chain.
//!
//! Both evolutions are computed from exact eigendecompositions, so the
//! compression identities hold up to roundoff and no integrator error
//! enters.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{KrylovError, Result};
use crate::lanczos::KrylovDecomposition;
use crate::linalg::{
    eig_hermitian_dense, eig_tridiagonal_full, CMatrix, HermitianOperator, StateVector,
    TridiagonalEigen, TridiagonalReal, C64, ZERO,
};

/// `exp(-iHt)|psi0>` by dense eigendecomposition.
pub fn evolve_full(h: &HermitianOperator, psi0: &StateVector, t: f64) -> Result<Vec<C64>> {
    if psi0.dim() != h.dim() {
        return Err(KrylovError::DimensionMismatch {
            expected: h.dim(),
            found: psi0.dim(),
        });
    }
    let eig = eig_hermitian_dense(h)?;
    Ok(eig.apply_function(|x| C64::from_polar(1.0, -x * t), psi0.as_slice()))
}

/// Amplitudes `psi_n(t)` on the chain.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainState {
    pub amplitudes: Vec<C64>,
    pub time: f64,
}

impl ChainState {
    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }
}

/// Cached eigendecomposition of a Jacobi matrix for repeated propagation.
#[derive(Clone, Debug)]
pub struct ChainPropagator {
    eig: TridiagonalEigen,
}

impl ChainPropagator {
    pub fn new(j: &TridiagonalReal) -> Result<Self> {
        Ok(ChainPropagator {
            eig: eig_tridiagonal_full(j)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.eig.dim()
    }

    /// `exp(-iJt) v`.
    pub fn propagate(&self, t: f64, v: &[C64]) -> Vec<C64> {
        let m = self.dim();
        if t == 0.0 {
            return v.to_vec();
        }
        let mut out = vec![ZERO; m];
        for k in 0..m {
            let overlap: C64 = (0..m).map(|i| v[i] * self.eig.component(i, k)).sum();
            let c = overlap * C64::from_polar(1.0, -self.eig.values[k] * t);
            for (i, o) in out.iter_mut().enumerate() {
                *o += c * self.eig.component(i, k);
            }
        }
        out
    }

    /// `exp(-iJt) e_1`, where `e_1` is site 0.
    pub fn evolve(&self, t: f64) -> ChainState {
        let m = self.dim();
        let mut amplitudes = vec![ZERO; m];
        if t == 0.0 {
            amplitudes[0] = C64::new(1.0, 0.0);
            return ChainState { amplitudes, time: t };
        }
        for k in 0..m {
            let c = C64::from_polar(self.eig.component(0, k), -self.eig.values[k] * t);
            for (i, a) in amplitudes.iter_mut().enumerate() {
                *a += c * self.eig.component(i, k);
            }
        }
        ChainState {
            amplitudes,
            time: t,
        }
    }
}

/// `exp(-iJt) e_1` for the Jacobi matrix of `k`.
pub fn evolve_chain(k: &KrylovDecomposition, t: f64) -> Result<ChainState> {
    Ok(ChainPropagator::new(k.jacobi())?.evolve(t))
}

/// `C = sum_n n |psi_n|^2`.
pub fn mean_position(state: &ChainState) -> f64 {
    state
        .amplitudes
        .iter()
        .enumerate()
        .map(|(n, a)| n as f64 * a.norm_sqr())
        .sum()
}

/// `<e_1| prod_s exp(iJt_s) A_s exp(-iJt_s) |e_1>` with compressed
/// observables `A_s = V^dag A V`.
///
/// Equals the ambient Heisenberg correlator whenever every intermediate
/// vector stays in the Krylov space, in particular when `m` equals the
/// ambient dimension or when the observables are functions of `H`. A
/// single observable is always exact.
pub fn correlator(
    k: &KrylovDecomposition,
    observables: &[CMatrix],
    times: &[f64],
) -> Result<C64> {
    if observables.len() != times.len() {
        return Err(KrylovError::DimensionMismatch {
            expected: observables.len(),
            found: times.len(),
        });
    }
    let m = k.m();
    for obs in observables {
        if obs.rows() != m || obs.cols() != m {
            return Err(KrylovError::DimensionMismatch {
                expected: m,
                found: obs.rows(),
            });
        }
    }
    let prop = ChainPropagator::new(k.jacobi())?;
    let mut v = vec![ZERO; m];
    v[0] = C64::new(1.0, 0.0);
    for (obs, &t) in observables.iter().zip(times).rev() {
        v = prop.propagate(t, &v);
        v = obs.matvec(&v);
        v = prop.propagate(-t, &v);
    }
    Ok(v[0])
}

/// Disorder on the recurrence coefficients: each `a_n` and `b_n` is
/// shifted by an independent uniform draw from `[-strength, strength]`.
/// Shifts of `b_n` are clamped to `0.5 * |b_n|` to keep hopping positive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DisorderSpec {
    pub strength_a: f64,
    pub strength_b: f64,
    pub seed: u64,
}

pub fn perturb_coefficients(a: &[f64], b: &[f64], spec: &DisorderSpec) -> (Vec<f64>, Vec<f64>) {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let a_out = a
        .iter()
        .map(|&x| x + spec.strength_a * (2.0 * rng.gen::<f64>() - 1.0))
        .collect();
    let b_out = b
        .iter()
        .map(|&x| {
            let limit = 0.5 * x;
            let delta = (spec.strength_b * (2.0 * rng.gen::<f64>() - 1.0)).clamp(-limit, limit);
            x + delta
        })
        .collect();
    (a_out, b_out)
}

#[derive(Clone, Debug, Serialize)]
pub struct DisorderCurves {
    pub times: Vec<f64>,
    pub clean: Vec<f64>,
    pub disordered: Vec<f64>,
    pub perturbed_a: Vec<f64>,
    pub perturbed_b: Vec<f64>,
}

/// Mean position `C(t)` for the clean and the disordered chain, both
/// started from site 0.
pub fn disorder_experiment(
    a: &[f64],
    b: &[f64],
    spec: &DisorderSpec,
    t_grid: &[f64],
) -> Result<DisorderCurves> {
    if !(spec.strength_a >= 0.0 && spec.strength_b >= 0.0) {
        return Err(KrylovError::InvalidArgument(
            "disorder strengths must be nonnegative".into(),
        ));
    }
    let clean_j = TridiagonalReal::new(a.to_vec(), b.to_vec())?;
    let (pa, pb) = perturb_coefficients(a, b, spec);
    let dirty_j = TridiagonalReal::new(pa.clone(), pb.clone())?;
    let curve = |j: &TridiagonalReal| -> Result<Vec<f64>> {
        let prop = ChainPropagator::new(j)?;
        Ok(t_grid.iter().map(|&t| mean_position(&prop.evolve(t))).collect())
    };
    Ok(DisorderCurves {
        times: t_grid.to_vec(),
        clean: curve(&clean_j)?,
        disordered: curve(&dirty_j)?,
        perturbed_a: pa,
        perturbed_b: pb,
    })
}

/// Average of `curve` over samples with `lo <= t <= hi`.
pub fn window_average(times: &[f64], curve: &[f64], lo: f64, hi: f64) -> Option<f64> {
    let picked: Vec<f64> = times
        .iter()
        .zip(curve)
        .filter(|(&t, _)| t >= lo && t <= hi)
        .map(|(_, &c)| c)
        .collect();
    (!picked.is_empty()).then(|| picked.iter().sum::<f64>() / picked.len() as f64)
}

pub fn linspace(start: f64, stop: f64, points: usize) -> Vec<f64> {
    match points {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..points)
            .map(|i| start + (stop - start) * i as f64 / (points - 1) as f64)
            .collect(),
    }
}
