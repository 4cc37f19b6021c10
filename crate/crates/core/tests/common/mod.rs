//! Reference computations for integration tests, kept independent of the
//! library's own eigensolvers.
#![allow(dead_code)]

use krylov_query::linalg::{CMatrix, HermitianOperator, StateVector, C64};
use krylov_query::random;

/// Cyclic Jacobi eigensolver for a dense real symmetric matrix (row-major).
/// Returns eigenvalues and the eigenvector matrix (column `k` belongs to
/// eigenvalue `k`).
pub fn jacobi_eigen(a: &[f64], n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut a = a.to_vec();
    let mut v = vec![0.0; n * n];
    for i in 0..n {
        v[i * n + i] = 1.0;
    }
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j].powi(2))
            .sum();
        let scale: f64 = a.iter().map(|x| x * x).sum::<f64>().max(f64::MIN_POSITIVE);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let theta = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[k * n + p];
                    let vkq = v[k * n + q];
                    v[k * n + p] = c * vkp - s * vkq;
                    v[k * n + q] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[i * n + i]).collect(), v)
}

/// Eigendecomposition of `H = A + iB` through the real symmetric embedding
/// `[[A, -B], [B, A]]`, whose spectrum is that of `H` doubled.
pub struct Oracle {
    n: usize,
    values: Vec<f64>,
    vectors: Vec<f64>,
}

impl Oracle {
    pub fn new(h: &HermitianOperator) -> Self {
        let n = h.dim();
        let m = h.matrix();
        let big = 2 * n;
        let mut e = vec![0.0; big * big];
        for i in 0..n {
            for j in 0..n {
                let z = m[(i, j)];
                e[i * big + j] = z.re;
                e[(i + n) * big + (j + n)] = z.re;
                e[i * big + (j + n)] = -z.im;
                e[(i + n) * big + j] = z.im;
            }
        }
        let (values, vectors) = jacobi_eigen(&e, big);
        Oracle {
            n,
            values,
            vectors,
        }
    }

    /// Eigenvalues of `H`, ascending, each once per multiplicity.
    pub fn spectrum(&self) -> Vec<f64> {
        let mut v = self.values.clone();
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.into_iter().step_by(2).collect()
    }

    fn apply_real(&self, g: &dyn Fn(f64) -> f64, x: &[f64]) -> Vec<f64> {
        let big = 2 * self.n;
        let mut out = vec![0.0; big];
        for k in 0..big {
            let overlap: f64 = (0..big).map(|i| self.vectors[i * big + k] * x[i]).sum();
            let c = g(self.values[k]) * overlap;
            for (i, o) in out.iter_mut().enumerate() {
                *o += c * self.vectors[i * big + k];
            }
        }
        out
    }

    /// `f(H) x` for complex-valued `f`, split as `Re f + i Im f`.
    pub fn apply(&self, f: &dyn Fn(f64) -> C64, x: &[C64]) -> Vec<C64> {
        let n = self.n;
        let mut stacked = vec![0.0; 2 * n];
        for i in 0..n {
            stacked[i] = x[i].re;
            stacked[i + n] = x[i].im;
        }
        let re = self.apply_real(&|l| f(l).re, &stacked);
        let im = self.apply_real(&|l| f(l).im, &stacked);
        (0..n)
            .map(|i| C64::new(re[i], re[i + n]) + C64::new(0.0, 1.0) * C64::new(im[i], im[i + n]))
            .collect()
    }

    pub fn evolve(&self, psi: &[C64], t: f64) -> Vec<C64> {
        self.apply(&|l| C64::from_polar(1.0, -l * t), psi)
    }
}

/// `x^dag y`, written out here so the tests do not depend on the library.
pub fn inner(x: &[C64], y: &[C64]) -> C64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

pub fn dist(x: &[C64], y: &[C64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

pub fn norm(x: &[C64]) -> f64 {
    x.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
}

/// `<psi| H^k |psi>` by repeated matvecs.
pub fn matvec_moment(h: &HermitianOperator, psi: &StateVector, k: u32) -> C64 {
    let mut v = psi.as_slice().to_vec();
    for _ in 0..k {
        v = h.matrix().matvec(&v);
    }
    inner(psi.as_slice(), &v)
}

/// Random Hermitian matrix with the given spectrum, for degenerate cases.
pub fn with_spectrum(values: &[f64], seed: u64) -> HermitianOperator {
    random::hermitian_with_spectrum(values, seed).unwrap()
}

/// Random dense complex matrix, not Hermitian.
pub fn random_matrix(n: usize, seed: u64) -> CMatrix {
    let vals = random::tabulated_values(n * n, seed);
    let rows = (0..n).map(|i| vals[i * n..(i + 1) * n].to_vec()).collect();
    CMatrix::from_rows(rows).unwrap()
}

/// 64-point logspace on `[0.01, 1]` with the nearest points snapped to
/// `1/k` for `k` in `{2, 5, 10, 20}`, so those thresholds are eigenvalues.
pub fn snapped_logspace() -> Vec<f64> {
    let dim = 64;
    let mut spec: Vec<f64> = (0..dim)
        .map(|i| 10f64.powf(-2.0 + 2.0 * i as f64 / (dim - 1) as f64))
        .collect();
    for k in [2.0, 5.0, 10.0, 20.0] {
        let t = 1.0 / k;
        let j = (0..dim)
            .min_by(|&a, &b| (spec[a] - t).abs().partial_cmp(&(spec[b] - t).abs()).unwrap())
            .unwrap();
        spec[j] = t;
    }
    spec
}

/// Index of the atom nearest to `lambda`.
pub fn nearest_index(atoms: &[f64], lambda: f64) -> usize {
    (0..atoms.len())
        .min_by(|&a, &b| {
            (atoms[a] - lambda)
                .abs()
                .partial_cmp(&(atoms[b] - lambda).abs())
                .unwrap()
        })
        .unwrap()
}

/// `f(H) psi` for a target tabulated on `atoms`: every oracle eigenvalue
/// takes the value of its nearest atom.
pub fn apply_tabulated(oracle: &Oracle, atoms: &[f64], values: &[C64], psi: &[C64]) -> Vec<C64> {
    oracle.apply(&|l| values[nearest_index(atoms, l)], psi)
}
