//! Orthonormal (Favard) polynomials of the spectral measure and the
//! expansion of a target function in them.
//!
//! The polynomials obey
//! `lambda P_n = b_{n+1} P_{n+1} + a_n P_n + b_n P_{n-1}` with `P_0 = 1`,
//! `P_{-1} = 0`. They are orthonormal, so every `h_n` is one.

use crate::error::{KrylovError, Result};
use crate::linalg::C64;
use crate::measure::DiscreteMeasure;

/// `1/lambda` is refused on atoms with `|lambda| < INVERSE_GUARD_REL * radius`.
pub const INVERSE_GUARD_REL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq)]
pub enum TargetFunction {
    Inverse,
    TimeEvolution { t: f64 },
    GaussianFilter { center: f64, width: f64 },
    /// Indicator of `lambda <= threshold`.
    StepFilter { threshold: f64 },
    Monomial { k: u32 },
    /// Values at the atoms of a specific measure, in ascending atom order.
    Tabulated { values: Vec<C64> },
}

impl TargetFunction {
    pub fn name(&self) -> &'static str {
        match self {
            TargetFunction::Inverse => "inverse",
            TargetFunction::TimeEvolution { .. } => "time_evolution",
            TargetFunction::GaussianFilter { .. } => "gaussian_filter",
            TargetFunction::StepFilter { .. } => "step_filter",
            TargetFunction::Monomial { .. } => "monomial",
            TargetFunction::Tabulated { .. } => "tabulated",
        }
    }

    /// Pointwise value. Tabulated targets have no value off their atoms.
    pub fn eval(&self, x: f64) -> Result<C64> {
        let v = match self {
            TargetFunction::Inverse => C64::new(1.0 / x, 0.0),
            TargetFunction::TimeEvolution { t } => C64::from_polar(1.0, -x * t),
            TargetFunction::GaussianFilter { center, width } => {
                let u = (x - center) / width;
                C64::new((-0.5 * u * u).exp(), 0.0)
            }
            TargetFunction::StepFilter { threshold } => {
                C64::new(if x <= *threshold { 1.0 } else { 0.0 }, 0.0)
            }
            TargetFunction::Monomial { k } => C64::new(x.powi(*k as i32), 0.0),
            TargetFunction::Tabulated { .. } => return Err(KrylovError::UnsupportedTarget),
        };
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(KrylovError::NonFiniteTarget { lambda: x });
        }
        Ok(v)
    }

    /// Values at every atom of `mu`.
    pub fn values_on(&self, mu: &DiscreteMeasure) -> Result<Vec<C64>> {
        match self {
            TargetFunction::Tabulated { values } => {
                if values.len() != mu.len() {
                    return Err(KrylovError::DimensionMismatch {
                        expected: mu.len(),
                        found: values.len(),
                    });
                }
                if let Some(i) = values
                    .iter()
                    .position(|v| !(v.re.is_finite() && v.im.is_finite()))
                {
                    return Err(KrylovError::NonFiniteTarget {
                        lambda: mu.atoms()[i],
                    });
                }
                Ok(values.clone())
            }
            TargetFunction::Inverse => {
                let guard = INVERSE_GUARD_REL * mu.spectral_radius();
                for (i, &x) in mu.atoms().iter().enumerate() {
                    if x.abs() < guard || x == 0.0 {
                        return Err(KrylovError::SingularAtom { atom: i, lambda: x });
                    }
                }
                mu.atoms().iter().map(|&x| self.eval(x)).collect()
            }
            _ => mu.atoms().iter().map(|&x| self.eval(x)).collect(),
        }
    }
}

/// `(P_0(lambda), ..., P_up_to(lambda))` by forward recurrence.
pub fn eval_orthonormal_polys(a: &[f64], b: &[f64], lambda: f64, up_to: usize) -> Result<Vec<f64>> {
    if up_to >= a.len() || up_to > b.len() {
        return Err(KrylovError::IndexOutOfRange {
            index: up_to,
            max: a.len().min(b.len() + 1).saturating_sub(1),
        });
    }
    let mut p = Vec::with_capacity(up_to + 1);
    p.push(1.0);
    for n in 0..up_to {
        let prev = if n > 0 { b[n - 1] * p[n - 1] } else { 0.0 };
        p.push(((lambda - a[n]) * p[n] - prev) / b[n]);
    }
    Ok(p)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FavardExpansion {
    measure: DiscreteMeasure,
    a: Vec<f64>,
    b: Vec<f64>,
    coeffs: Vec<C64>,
    f_norm_sq: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Truncation {
    pub coeffs: Vec<C64>,
    pub tail_error: f64,
}

/// `c_n = sum_i w_i f(lambda_i) P_n(lambda_i)`, exact on the finite support.
///
/// The vectors `q_n[i] = sqrt(w_i) P_n(lambda_i)` are orthonormal, and
/// they are generated by the recurrence on `diag(atoms)` with every new
/// vector reorthogonalized against the previous ones. The bare scalar
/// recurrence at the atoms loses all accuracy at high degree on clustered
/// supports.
///
/// The number of terms is `min(a.len(), atoms)`; the two agree unless
/// atoms were merged.
pub fn expand(
    f: &TargetFunction,
    mu: &DiscreteMeasure,
    a: &[f64],
    b: &[f64],
) -> Result<FavardExpansion> {
    if a.is_empty() || b.len() + 1 < a.len() {
        return Err(KrylovError::DimensionMismatch {
            expected: a.len().saturating_sub(1),
            found: b.len(),
        });
    }
    let values = f.values_on(mu)?;
    let terms = a.len().min(mu.len());
    let atoms = mu.atoms();
    let sqrt_w: Vec<f64> = mu.weights().iter().map(|w| w.sqrt()).collect();
    let g: Vec<C64> = values.iter().zip(&sqrt_w).map(|(v, s)| v * s).collect();

    let mut q: Vec<Vec<f64>> = Vec::with_capacity(terms);
    q.push(sqrt_w.clone());
    for n in 0..terms - 1 {
        let mut next: Vec<f64> = atoms
            .iter()
            .zip(&q[n])
            .map(|(x, v)| (x - a[n]) * v)
            .collect();
        if n > 0 {
            for (y, p) in next.iter_mut().zip(&q[n - 1]) {
                *y -= b[n - 1] * p;
            }
        }
        for _ in 0..2 {
            for prev in &q {
                let overlap: f64 = prev.iter().zip(&next).map(|(u, v)| u * v).sum();
                for (y, p) in next.iter_mut().zip(prev) {
                    *y -= overlap * p;
                }
            }
        }
        for y in next.iter_mut() {
            *y /= b[n];
        }
        q.push(next);
    }
    let coeffs: Vec<C64> = q
        .iter()
        .map(|qn| qn.iter().zip(&g).map(|(u, v)| v * u).sum())
        .collect();
    let f_norm_sq = g.iter().map(|v| v.norm_sqr()).sum();
    Ok(FavardExpansion {
        measure: mu.clone(),
        a: a[..terms].to_vec(),
        b: b[..terms - 1].to_vec(),
        coeffs,
        f_norm_sq,
    })
}

impl FavardExpansion {
    pub fn measure(&self) -> &DiscreteMeasure {
        &self.measure
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> &[f64] {
        &self.b
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `integral |f|^2 dmu`.
    pub fn f_norm_sq(&self) -> f64 {
        self.f_norm_sq
    }

    /// `sqrt(sum_{n>d} |c_n|^2)`.
    pub fn tail_error(&self, d: usize) -> Result<f64> {
        if d >= self.len() {
            return Err(KrylovError::IndexOutOfRange {
                index: d,
                max: self.len() - 1,
            });
        }
        // Summed from the top so that it matches `tail_curve` bitwise.
        Ok(self.coeffs[d + 1..]
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc + c.norm_sqr())
            .sqrt())
    }

    pub fn truncate(&self, d: usize) -> Result<Truncation> {
        let tail_error = self.tail_error(d)?;
        Ok(Truncation {
            coeffs: self.coeffs[..=d].to_vec(),
            tail_error,
        })
    }

    /// `(d, tail(d))` for every admissible degree.
    pub fn tail_curve(&self) -> Vec<(usize, f64)> {
        let mut out = vec![(0, 0.0); self.len()];
        let mut acc = 0.0f64;
        for d in (0..self.len()).rev() {
            out[d] = (d, acc.sqrt());
            acc += self.coeffs[d].norm_sqr();
        }
        out
    }

    /// `p_d(lambda) = sum_{n<=d} c_n P_n(lambda)`.
    pub fn eval_truncation(&self, d: usize, lambda: f64) -> Result<C64> {
        let p = eval_orthonormal_polys(&self.a, &self.b, lambda, d)?;
        Ok(self.coeffs.iter().zip(&p).map(|(c, pn)| c * pn).sum())
    }
}
