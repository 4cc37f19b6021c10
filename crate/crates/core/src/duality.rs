//! State-aware query complexity.
//!
//! The minimal number of `H` queries needed to prepare `f(H)|psi0>` to
//! accuracy `eps` is the smallest degree `d` whose Favard truncation error
//! `sqrt(sum_{n>d} |c_n|^2)` is at most `eps`. This module computes that
//! degree, certifies it operationally with a matvec-counting polynomial
//! applier, checks it against a brute-force least-squares oracle, and
//! compares it with the state-oblivious Chebyshev degree on the whole
//! spectrum.

use std::cell::Cell;

use serde::Serialize;

use crate::chebyshev::{basis_values, ChebyshevInterpolant};
use crate::error::{KrylovError, Result};
use crate::favard::{expand, FavardExpansion, TargetFunction};
use crate::lanczos::{lanczos_decompose, KrylovDecomposition};
use crate::linalg::gram::project_out;
use crate::linalg::lstsq;
use crate::linalg::{axpy, distance, eig_hermitian_dense, HermitianOperator, StateVector, C64};
use crate::measure::{measure_from_decomposition, DiscreteMeasure};

/// A coefficient with `|c_n| <= COEFF_ZERO_REL * ||f||` counts as zero when
/// `eps = 0`.
pub const COEFF_ZERO_REL: f64 = 1e-10;
/// The least-squares oracle refuses systems whose condition estimate
/// exceeds this.
pub const ORACLE_MAX_CONDITION: f64 = 1e12;
/// Grid size for the sup-norm estimate in [`worst_case_degree`].
pub const WORST_CASE_GRID: usize = 1000;
/// Largest Chebyshev degree tried by [`worst_case_degree`].
pub const WORST_CASE_DEGREE_CAP: usize = 512;

/// `n_mu(f, eps)`: smallest `d` with `tail(d) <= eps`.
///
/// For `eps <= 0` returns the largest `n` with `|c_n|` above
/// `COEFF_ZERO_REL * ||f||`, the exact interpolation degree on the support.
pub fn degree_functional(exp: &FavardExpansion, epsilon: f64) -> usize {
    if epsilon <= 0.0 {
        let tol = COEFF_ZERO_REL * exp.f_norm_sq().sqrt();
        return exp
            .coeffs()
            .iter()
            .rposition(|c| c.norm() > tol)
            .unwrap_or(0);
    }
    exp.tail_curve()
        .into_iter()
        .find(|&(_, tail)| tail <= epsilon)
        .map_or(exp.len() - 1, |(d, _)| d)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OracleBasis {
    /// Chebyshev polynomials on the hull of the atoms.
    Chebyshev,
    /// Raw monomials; only sensible at small degree.
    Monomial,
}

/// `min_{deg q <= d} ||f - q||_{L2(mu)}` by weighted least squares over all
/// polynomials of degree `<= d`, independent of the Lanczos coefficients.
pub fn least_squares_oracle(f: &TargetFunction, mu: &DiscreteMeasure, d: usize) -> Result<f64> {
    least_squares_oracle_with(f, mu, d, OracleBasis::Chebyshev)
}

pub fn least_squares_oracle_with(
    f: &TargetFunction,
    mu: &DiscreteMeasure,
    d: usize,
    basis: OracleBasis,
) -> Result<f64> {
    if d >= mu.len() {
        return Err(KrylovError::IndexOutOfRange {
            index: d,
            max: mu.len() - 1,
        });
    }
    let values = f.values_on(mu)?;
    let fit = weighted_polynomial_fit(mu.atoms(), mu.weights(), &values, d, basis)?;
    if fit.condition_estimate > ORACLE_MAX_CONDITION {
        return Err(KrylovError::IllConditioned {
            condition: fit.condition_estimate,
        });
    }
    Ok(fit.residual_norm)
}

/// Weighted polynomial least squares on a point set. Points with zero
/// weight are ignored. The returned coefficients refer to `basis` on the
/// hull of `atoms`.
pub(crate) fn weighted_polynomial_fit(
    atoms: &[f64],
    weights: &[f64],
    values: &[C64],
    d: usize,
    basis: OracleBasis,
) -> Result<lstsq::LeastSquares> {
    let (lo, hi) = hull(atoms);
    let cols = d + 1;
    let rows: Vec<usize> = (0..atoms.len()).filter(|&i| weights[i] > 0.0).collect();
    if rows.len() < cols {
        return Err(KrylovError::IndexOutOfRange {
            index: d,
            max: rows.len().saturating_sub(1),
        });
    }
    let mut design = Vec::with_capacity(rows.len() * cols);
    let mut rhs = Vec::with_capacity(rows.len());
    for &i in &rows {
        let sw = weights[i].sqrt();
        design.extend(basis_row(atoms[i], lo, hi, cols, basis).into_iter().map(|v| v * sw));
        rhs.push(values[i] * sw);
    }
    lstsq::solve(&design, rows.len(), cols, &rhs)
}

pub(crate) fn basis_row(x: f64, lo: f64, hi: f64, count: usize, basis: OracleBasis) -> Vec<f64> {
    match basis {
        OracleBasis::Chebyshev if hi > lo => basis_values(x, lo, hi, count),
        // A single point: any basis with a nonzero constant column will do.
        OracleBasis::Chebyshev => (0..count).map(|k| if k == 0 { 1.0 } else { 0.0 }).collect(),
        OracleBasis::Monomial => (0..count).map(|k| x.powi(k as i32)).collect(),
    }
}

fn hull(atoms: &[f64]) -> (f64, f64) {
    let lo = atoms.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = atoms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

/// Wraps `H` and counts every matrix-vector product. Vector additions and
/// scalings are free.
pub struct CountingOperator<'a> {
    inner: &'a HermitianOperator,
    count: Cell<usize>,
}

impl<'a> CountingOperator<'a> {
    pub fn new(inner: &'a HermitianOperator) -> Self {
        CountingOperator {
            inner,
            count: Cell::new(0),
        }
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        self.count.set(self.count.get() + 1);
        self.inner.apply(x)
    }

    pub fn queries(&self) -> usize {
        self.count.get()
    }
}

#[derive(Clone, Debug)]
pub struct CountedApplication {
    pub state: Vec<C64>,
    pub matvecs: usize,
}

/// `p_d(H)|psi0> = sum_{n<=d} c_n P_n(H)|psi0>` using only the vector
/// three-term recurrence; each new `P_{n+1}(H)|psi0>` costs one matvec,
/// so exactly `d` queries are made.
///
/// Every new vector is reorthogonalized against the ones already
/// generated. In exact arithmetic this removes nothing; in floating point
/// it stops the exponential roundoff growth of the bare recurrence on
/// clustered spectra. It uses inner products only, which are free in the
/// query model.
pub fn apply_polynomial_counted(
    h: &HermitianOperator,
    psi0: &StateVector,
    exp: &FavardExpansion,
    d: usize,
) -> Result<CountedApplication> {
    if psi0.dim() != h.dim() {
        return Err(KrylovError::DimensionMismatch {
            expected: h.dim(),
            found: psi0.dim(),
        });
    }
    if d >= exp.len() {
        return Err(KrylovError::IndexOutOfRange {
            index: d,
            max: exp.len() - 1,
        });
    }
    let oracle = CountingOperator::new(h);
    let (a, b, c) = (exp.a(), exp.b(), exp.coeffs());

    let mut prev: Vec<C64> = Vec::new();
    let mut generated: Vec<Vec<C64>> = Vec::with_capacity(d);
    let mut cur = psi0.as_slice().to_vec();
    let mut out: Vec<C64> = cur.iter().map(|v| v * c[0]).collect();
    for n in 0..d {
        let mut next = oracle.apply(&cur);
        axpy(C64::new(-a[n], 0.0), &cur, &mut next);
        if n > 0 {
            axpy(C64::new(-b[n - 1], 0.0), &prev, &mut next);
        }
        generated.push(cur.clone());
        project_out(&generated, &mut next);
        project_out(&generated, &mut next);
        let inv = 1.0 / b[n];
        for v in next.iter_mut() {
            *v *= inv;
        }
        axpy(c[n + 1], &next, &mut out);
        prev = std::mem::replace(&mut cur, next);
    }
    Ok(CountedApplication {
        state: out,
        matvecs: oracle.queries(),
    })
}

/// Smallest `d` whose degree-`d` Chebyshev interpolant on `[lo, hi]` has
/// sup error `<= eps` on a 1000-point grid.
///
/// An upper-bound proxy for the minimax degree (interpolation is within a
/// logarithmic factor of best). `eps` is floored at `1e-12 * max|f|`.
pub fn worst_case_degree(f: &TargetFunction, interval: (f64, f64), epsilon: f64) -> Result<usize> {
    let (lo, hi) = interval;
    if !(lo < hi) {
        return Err(KrylovError::InvalidArgument(format!(
            "interval [{lo}, {hi}] is empty"
        )));
    }
    if matches!(f, TargetFunction::Tabulated { .. }) {
        return Err(KrylovError::UnsupportedTarget);
    }
    if matches!(f, TargetFunction::Inverse) && lo <= 0.0 && hi >= 0.0 {
        return Err(KrylovError::SingularOnInterval { lo, hi });
    }
    // No polynomial gets within half the jump of a step in sup norm.
    if let TargetFunction::StepFilter { threshold } = f {
        if lo <= *threshold && *threshold < hi && epsilon < 0.5 {
            return Err(KrylovError::DegreeCapExceeded {
                cap: WORST_CASE_DEGREE_CAP,
            });
        }
    }
    let eval = |x: f64| {
        f.eval(x)
            .map_err(|_| KrylovError::SingularOnInterval { lo, hi })
    };
    let grid: Vec<f64> = (0..WORST_CASE_GRID)
        .map(|i| lo + (hi - lo) * i as f64 / (WORST_CASE_GRID - 1) as f64)
        .collect();
    let truth: Vec<C64> = grid.iter().map(|&x| eval(x)).collect::<Result<_>>()?;
    let scale = truth.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let target = epsilon.max(1e-12 * scale);

    for d in 0..=WORST_CASE_DEGREE_CAP {
        let p = ChebyshevInterpolant::fit(eval, lo, hi, d)?;
        let sup = grid
            .iter()
            .zip(&truth)
            .map(|(&x, fx)| (p.eval(x) - fx).norm())
            .fold(0.0, f64::max);
        if sup <= target {
            return Ok(d);
        }
    }
    Err(KrylovError::DegreeCapExceeded {
        cap: WORST_CASE_DEGREE_CAP,
    })
}

/// Outcome of the state-aware query procedure.
#[derive(Clone, Debug, Serialize)]
pub struct QueryReport {
    pub target: String,
    pub krylov_dim: usize,
    /// State-aware degree `n_mu(f, eps)`, in the `L2(mu)` norm.
    pub n_mu: usize,
    pub epsilon: f64,
    pub f_norm: f64,
    pub tail_curve: Vec<(usize, f64)>,
    /// Tail error at `n_mu`.
    pub predicted_error: f64,
    /// State-oblivious Chebyshev degree on the spectrum hull, sup norm.
    pub worst_case_degree: Option<usize>,
    pub worst_case_interval: Option<(f64, f64)>,
    pub worst_case_note: Option<String>,
    pub matvec_count: usize,
    /// `||p_d(H)psi0 - f(H)psi0||` for the counted output.
    pub achieved_error: f64,
    pub kappa_eff: Option<f64>,
    pub kappa_global: Option<f64>,
}

impl QueryReport {
    /// Report invariants: the counter certifies `n_mu`, `n_mu <= m - 1`, and
    /// the achieved error meets `eps` up to roundoff.
    pub fn check_invariants(&self) -> std::result::Result<(), String> {
        if self.matvec_count != self.n_mu {
            return Err(format!(
                "matvec count {} differs from n_mu {}",
                self.matvec_count, self.n_mu
            ));
        }
        if self.n_mu + 1 > self.krylov_dim {
            return Err(format!(
                "n_mu {} exceeds krylov dimension {} - 1",
                self.n_mu, self.krylov_dim
            ));
        }
        let slack = 1e-9 * self.f_norm.max(1.0);
        if self.achieved_error > self.epsilon + slack {
            return Err(format!(
                "achieved error {:e} exceeds epsilon {:e}",
                self.achieved_error, self.epsilon
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct DualityOutcome {
    pub report: QueryReport,
    pub krylov: KrylovDecomposition,
    pub measure: DiscreteMeasure,
    pub expansion: FavardExpansion,
    pub output_state: Vec<C64>,
}

/// Steps one to three of the procedure (Krylov basis, coefficients,
/// measure), reusable for several targets.
#[derive(Clone, Debug)]
pub struct StateAwareQuery<'a> {
    h: &'a HermitianOperator,
    psi0: &'a StateVector,
    krylov: KrylovDecomposition,
    measure: DiscreteMeasure,
}

impl<'a> StateAwareQuery<'a> {
    pub fn new(h: &'a HermitianOperator, psi0: &'a StateVector) -> Result<Self> {
        let krylov = lanczos_decompose(h, psi0, None)?;
        let measure = measure_from_decomposition(&krylov)?;
        Ok(StateAwareQuery {
            h,
            psi0,
            krylov,
            measure,
        })
    }

    pub fn krylov(&self) -> &KrylovDecomposition {
        &self.krylov
    }

    pub fn measure(&self) -> &DiscreteMeasure {
        &self.measure
    }

    pub fn expand(&self, f: &TargetFunction) -> Result<FavardExpansion> {
        expand(f, &self.measure, self.krylov.a(), self.krylov.b())
    }

    /// Steps four to six: expand, pick `d = n_mu(f, eps)`, apply `p_d(H)`
    /// with a query counter. The worst-case fields are left empty.
    pub fn run(&self, f: &TargetFunction, epsilon: f64) -> Result<DualityOutcome> {
        if !(epsilon >= 0.0) {
            return Err(KrylovError::InvalidArgument(format!(
                "epsilon must be nonnegative, got {epsilon}"
            )));
        }
        let expansion = self.expand(f)?;
        let n_mu = degree_functional(&expansion, epsilon);
        let applied = apply_polynomial_counted(self.h, self.psi0, &expansion, n_mu)?;
        // f(H)psi0 = sum_n c_n |K_n> exactly on the finite support.
        let mut reference_coords = expansion.coeffs().to_vec();
        reference_coords.resize(self.krylov.m(), C64::new(0.0, 0.0));
        let reference = self.krylov.apply_isometry(&reference_coords)?;
        let achieved_error = distance(&applied.state, &reference);

        let report = QueryReport {
            target: f.name().to_string(),
            krylov_dim: self.krylov.m(),
            n_mu,
            epsilon,
            f_norm: expansion.f_norm_sq().sqrt(),
            tail_curve: expansion.tail_curve(),
            predicted_error: expansion.tail_error(n_mu)?,
            worst_case_degree: None,
            worst_case_interval: None,
            worst_case_note: None,
            matvec_count: applied.matvecs,
            achieved_error,
            kappa_eff: None,
            kappa_global: None,
        };
        Ok(DualityOutcome {
            report,
            krylov: self.krylov.clone(),
            measure: self.measure.clone(),
            expansion,
            output_state: applied.state,
        })
    }
}

/// Degree on the full-spectrum hull; a hull of one point needs degree 0.
fn spectrum_worst_case(
    f: &TargetFunction,
    spectrum: &[f64],
    epsilon: f64,
) -> (Option<(f64, f64)>, Result<usize>) {
    let (lo, hi) = hull(spectrum);
    let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
    if hi - lo <= 1e-14 * scale {
        return (Some((lo, hi)), Ok(0));
    }
    (Some((lo, hi)), worst_case_degree(f, (lo, hi), epsilon))
}

/// The whole procedure end to end, plus the worst-case comparison on the
/// hull of `spec(H)`. A worst-case degree that cannot be computed (target
/// singular on the hull, tabulated target, degree cap) is recorded in
/// `worst_case_note` rather than failing the run.
pub fn run_duality_scenario(
    h: &HermitianOperator,
    psi0: &StateVector,
    f: &TargetFunction,
    epsilon: f64,
) -> Result<DualityOutcome> {
    let query = StateAwareQuery::new(h, psi0)?;
    let mut outcome = query.run(f, epsilon)?;
    let spectrum = eig_hermitian_dense(h)?.values;
    let (interval, degree) = spectrum_worst_case(f, &spectrum, epsilon);
    outcome.report.worst_case_interval = interval;
    match degree {
        Ok(d) => outcome.report.worst_case_degree = Some(d),
        Err(e) => outcome.report.worst_case_note = Some(e.to_string()),
    }
    Ok(outcome)
}

/// Linear-systems specialization with `f(x) = 1/x`: fills the effective
/// condition number over occupied atoms and the global one over the whole
/// spectrum, and the worst-case degree on the full spectrum hull.
pub fn hhl_analysis(a: &HermitianOperator, b: &StateVector, epsilon: f64) -> Result<DualityOutcome> {
    let f = TargetFunction::Inverse;
    let query = StateAwareQuery::new(a, b)?;
    let mut outcome = query.run(&f, epsilon)?;
    let spectrum = eig_hermitian_dense(a)?.values;
    let (interval, degree) = spectrum_worst_case(&f, &spectrum, epsilon);
    outcome.report.worst_case_interval = interval;
    outcome.report.worst_case_degree = Some(degree?);
    outcome.report.kappa_eff = Some(condition_ratio(outcome.measure.atoms()));
    let global = condition_ratio(&spectrum);
    outcome.report.kappa_global = global.is_finite().then_some(global);
    Ok(outcome)
}

/// `max|x| / min|x|`.
pub fn condition_ratio(values: &[f64]) -> f64 {
    let max = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
    let min = values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    max / min
}
