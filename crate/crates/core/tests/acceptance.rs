//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion and exits nonzero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::Instant;

use common::{dist, inner, Oracle};
use krylov_query::duality::{
    apply_polynomial_counted, degree_functional, hhl_analysis, least_squares_oracle,
    StateAwareQuery,
};
use krylov_query::dynamics::{disorder_experiment, evolve_chain, linspace, mean_position, window_average, correlator, DisorderSpec};
use krylov_query::family::{
    family_decompose, family_query_complexity, FamilyCriterion, StateFamily, DEFAULT_RANK_TOL,
};
use krylov_query::favard::{expand, TargetFunction};
use krylov_query::lanczos::lanczos_decompose;
use krylov_query::linalg::{HermitianOperator, StateVector, C64};
use krylov_query::measure::{greens_function_cfrac, measure_from_decomposition, DiscreteMeasure};
use krylov_query::random::{self, random_hermitian, random_state, tabulated_values, uniform_values};

type Verdict = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

struct Instance {
    h: HermitianOperator,
    psi: StateVector,
    label: String,
}

/// Thirty nondegenerate and thirty degenerate instances of dimension at
/// most 16, all with spectra away from zero when `positive` is set.
fn instances(positive: bool) -> Vec<Instance> {
    let mut out = Vec::new();
    for i in 0..30u64 {
        let dim = 4 + (i as usize % 13);
        let shift = if positive { 3.0 } else { 0.0 };
        out.push(Instance {
            h: random_hermitian(dim, 1000 + i, shift).unwrap(),
            psi: random_state(dim, 2000 + i).unwrap(),
            label: format!("nondegenerate dim {dim} seed {i}"),
        });
    }
    for i in 0..30u64 {
        let distinct = 3 + (i as usize % 6);
        let dim = (2 * distinct).min(16) + (i as usize % 3);
        let dim = dim.min(16);
        let lo = if positive { 1.0 } else { -2.0 };
        let levels = uniform_values(distinct, lo, lo + 3.0, 3000 + i);
        let spectrum: Vec<f64> = (0..dim).map(|j| levels[j % distinct]).collect();
        out.push(Instance {
            h: common::with_spectrum(&spectrum, 4000 + i),
            psi: random_state(dim, 5000 + i).unwrap(),
            label: format!("degenerate dim {dim} ({distinct} levels) seed {i}"),
        });
    }
    out
}

fn targets(mu_len: usize, seed: u64) -> Vec<TargetFunction> {
    vec![
        TargetFunction::Inverse,
        TargetFunction::TimeEvolution { t: 1.0 },
        TargetFunction::Monomial { k: 3 },
        TargetFunction::Tabulated {
            values: tabulated_values(mu_len, seed),
        },
    ]
}

fn criterion_1() -> Verdict {
    let start = Instant::now();
    let mut degree_checks = 0;
    let mut eps_checks = 0;
    let mut ties_skipped = 0;
    let mut worst = 0.0f64;
    let set = instances(true);
    for (idx, inst) in set.iter().enumerate() {
        let q = StateAwareQuery::new(&inst.h, &inst.psi).map_err(|e| e.to_string())?;
        for f in targets(q.measure().len(), 7000 + idx as u64) {
            let exp = q.expand(&f).map_err(|e| format!("{}: {e}", inst.label))?;
            let mut best = Vec::with_capacity(exp.len());
            for d in 0..exp.len() {
                let tail = exp.tail_error(d).unwrap();
                let ls = least_squares_oracle(&f, q.measure(), d)
                    .map_err(|e| format!("{} {} d={d}: {e}", inst.label, f.name()))?;
                worst = worst.max((tail - ls).abs());
                ensure!(
                    (tail - ls).abs() <= 1e-9,
                    "{} {} d={d}: tail {tail:e} vs oracle {ls:e}",
                    inst.label,
                    f.name()
                );
                best.push(ls);
                degree_checks += 1;
            }
            let fnorm = exp.f_norm_sq().sqrt();
            for rel in [1e-1, 1e-3, 1e-6] {
                let eps = rel * fnorm;
                if best.iter().any(|b| (b - eps).abs() < 1e-9) {
                    ties_skipped += 1;
                    continue;
                }
                let oracle_d = best.iter().position(|&b| b <= eps).unwrap_or(best.len() - 1);
                let n_mu = degree_functional(&exp, eps);
                ensure!(
                    n_mu == oracle_d,
                    "{} {} eps={eps:e}: n_mu {n_mu} vs oracle {oracle_d}",
                    inst.label,
                    f.name()
                );
                eps_checks += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure!(secs < 10.0, "runtime {secs:.2} s exceeds 10 s");
    Ok(format!(
        "{} instances x 4 targets, {degree_checks} degree checks (max gap {worst:.1e}), \
         {eps_checks} n_mu checks, {ties_skipped} near-ties skipped, {secs:.2} s",
        set.len()
    ))
}

fn criterion_2() -> Verdict {
    let mut runs = 0;
    let mut worst = 0.0f64;
    for (idx, inst) in instances(true).iter().enumerate() {
        let q = StateAwareQuery::new(&inst.h, &inst.psi).map_err(|e| e.to_string())?;
        let oracle = Oracle::new(&inst.h);
        for f in targets(q.measure().len(), 7000 + idx as u64) {
            let exp = q.expand(&f).map_err(|e| e.to_string())?;
            let truth = match &f {
                TargetFunction::Tabulated { values } => {
                    common::apply_tabulated(&oracle, q.measure().atoms(), values, inst.psi.as_slice())
                }
                _ => oracle.apply(&|l| f.eval(l).unwrap(), inst.psi.as_slice()),
            };
            for d in 0..exp.len() {
                let app = apply_polynomial_counted(&inst.h, &inst.psi, &exp, d).map_err(|e| e.to_string())?;
                ensure!(app.matvecs == d, "{}: {} matvecs for degree {d}", inst.label, app.matvecs);
                let err = dist(&app.state, &truth);
                let gap = (err - exp.tail_error(d).unwrap()).abs();
                worst = worst.max(gap);
                ensure!(gap <= 1e-9, "{} {} d={d}: error {err:e} vs tail gap {gap:e}", inst.label, f.name());
                runs += 1;
            }
        }
    }
    Ok(format!("{runs} counted applications, matvecs = d on all, max |error - tail| {worst:.1e}"))
}

fn criterion_3() -> Verdict {
    let trials = 100;
    let mut hits = 0;
    for i in 0..trials as u64 {
        let mut rng_vals = uniform_values(1, 2.0, 12.99, 9000 + i);
        let m = rng_vals.pop().unwrap().floor() as usize;
        let mut atoms = uniform_values(m, -1.0, 1.0, 9100 + i);
        atoms.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let raw = uniform_values(m, 0.05, 1.0, 9200 + i);
        let total: f64 = raw.iter().sum();
        let weights: Vec<f64> = raw.iter().map(|w| w / total).collect();
        let mu = DiscreteMeasure::new(atoms, weights).map_err(|e| e.to_string())?;
        let (a, b) = mu.jacobi_coefficients().map_err(|e| e.to_string())?;
        let f = TargetFunction::Tabulated {
            values: tabulated_values(m, 9300 + i),
        };
        let exp = expand(&f, &mu, &a, &b).map_err(|e| e.to_string())?;
        if a.len() == m && degree_functional(&exp, 0.0) == m - 1 {
            hits += 1;
        }
    }
    ensure!(hits * 100 >= 95 * trials, "only {hits}/{trials} trials gave n_mu(0) = m - 1");
    Ok(format!("{hits}/{trials} trials with n_mu(0) = m - 1"))
}

fn criterion_4() -> Verdict {
    let mut worst = 0.0f64;
    let mut checks = 0;
    for (i, dim) in [4usize, 8, 16, 24, 32, 48, 64].into_iter().enumerate() {
        let h = random_hermitian(dim, 11_000 + i as u64, 0.0).unwrap();
        let psi = random_state(dim, 12_000 + i as u64).unwrap();
        let k = lanczos_decompose(&h, &psi, None).map_err(|e| e.to_string())?;
        let oracle = Oracle::new(&h);
        let t_max = 10.0 * k.m() as f64 / h.norm();
        for t in linspace(0.0, t_max, 12) {
            let chain = evolve_chain(&k, t).map_err(|e| e.to_string())?;
            let lifted = k.apply_isometry(&chain.amplitudes).unwrap();
            let e = dist(&oracle.evolve(psi.as_slice(), t), &lifted);
            worst = worst.max(e);
            ensure!(e <= 1e-9, "dim {dim} t={t:.2}: state equality error {e:e}");
            checks += 1;
        }
    }
    let mut corr_worst = 0.0f64;
    for i in 0..20u64 {
        let dim = 3 + (i as usize % 10);
        let h = random_hermitian(dim, 13_000 + i, 0.0).unwrap();
        let psi = random_state(dim, 14_000 + i).unwrap();
        let k = lanczos_decompose(&h, &psi, None).map_err(|e| e.to_string())?;
        let oracle = Oracle::new(&h);
        let a = common::random_matrix(dim, 15_000 + i);
        let b = common::random_matrix(dim, 16_000 + i);
        let t = 0.3 + 0.2 * i as f64;
        let s = -1.0 + 0.15 * i as f64;
        let mut v = oracle.evolve(psi.as_slice(), s);
        v = b.matvec(&v);
        v = oracle.evolve(&v, -s);
        v = oracle.evolve(&v, t);
        v = a.matvec(&v);
        v = oracle.evolve(&v, -t);
        let ambient = inner(psi.as_slice(), &v);
        let ca = k.compress_matrix(&a).unwrap();
        let cb = k.compress_matrix(&b).unwrap();
        let compressed = correlator(&k, &[ca, cb], &[t, s]).map_err(|e| e.to_string())?;
        let e = (ambient - compressed).norm();
        corr_worst = corr_worst.max(e);
        ensure!(e <= 1e-9, "correlator instance {i} (dim {dim}, m {}): gap {e:e}", k.m());
    }
    Ok(format!(
        "{checks} state checks up to dim 64 (max {worst:.1e}); 20 two-time correlators (max {corr_worst:.1e})"
    ))
}

fn criterion_5() -> Verdict {
    let mut s_worst = 0.0f64;
    let mut g_worst = 0.0f64;
    let mut m_worst = 0.0f64;
    for i in 0..5u64 {
        let dim = 6 + 2 * i as usize;
        let h = random_hermitian(dim, 17_000 + i, 0.0).unwrap();
        let psi = random_state(dim, 18_000 + i).unwrap();
        let k = lanczos_decompose(&h, &psi, None).map_err(|e| e.to_string())?;
        let mu = measure_from_decomposition(&k).map_err(|e| e.to_string())?;
        let oracle = Oracle::new(&h);
        for t in linspace(0.0, 20.0, 100) {
            let direct = inner(psi.as_slice(), &oracle.evolve(psi.as_slice(), t));
            let e = (mu.survival_amplitude(t) - direct).norm();
            s_worst = s_worst.max(e);
            ensure!(e <= 1e-9, "S(t) gap {e:e} at t={t}");
        }
        let re = uniform_values(10, -3.0, 3.0, 19_000 + i);
        let im = uniform_values(10, 0.1, 2.0, 19_500 + i);
        for (j, (&x, &y)) in re.iter().zip(&im).enumerate() {
            let z = C64::new(x, if j % 2 == 0 { y } else { -y });
            let sum = mu.greens_function_sum(z).map_err(|e| e.to_string())?;
            let cf = greens_function_cfrac(k.a(), k.b(), z, k.m()).map_err(|e| e.to_string())?;
            let e = (sum - cf).norm();
            g_worst = g_worst.max(e);
            ensure!(e <= 1e-10, "G(z) forms differ by {e:e} at z={z}");
        }
        // Moments: measure vs matvec, and via Richardson-extrapolated
        // central differences of S, where S^{(k)}(0) = (-i)^k M_k.
        let s = |t: f64| mu.survival_amplitude(t);
        let deriv = |p: u32, step: f64| -> C64 {
            let binom = |n: u32, r: u32| (0..r).fold(1.0, |acc, q| acc * (n - q) as f64 / (q + 1) as f64);
            (0..=p)
                .map(|j| {
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    s((p as f64 / 2.0 - j as f64) * step) * (sign * binom(p, j))
                })
                .sum::<C64>()
                / step.powi(p as i32)
        };
        for p in 0..=4u32 {
            let direct = common::matvec_moment(&h, &psi, p).re;
            let scale = h.norm().powi(p as i32).max(1.0);
            ensure!((mu.moment(p) - direct).abs() <= 1e-9 * scale, "moment {p} vs matvec");
            let d = (deriv(p, 5e-3) * 4.0 - deriv(p, 1e-2)) / 3.0;
            let from_s = d / C64::new(0.0, -1.0).powu(p);
            let e = (from_s - C64::new(mu.moment(p), 0.0)).norm();
            m_worst = m_worst.max(e);
            ensure!(e <= 1e-4, "moment {p} from S derivative off by {e:e}");
        }
    }
    Ok(format!(
        "S(t) max gap {s_worst:.1e} (500 points); G(z) max gap {g_worst:.1e} (50 z); \
         derivative moments max gap {m_worst:.1e}"
    ))
}

fn criterion_6() -> Verdict {
    let mut parseval_worst = 0.0f64;
    for (idx, inst) in instances(true).iter().enumerate() {
        let q = StateAwareQuery::new(&inst.h, &inst.psi).map_err(|e| e.to_string())?;
        let oracle = Oracle::new(&inst.h);
        for f in targets(q.measure().len(), 7000 + idx as u64) {
            let exp = q.expand(&f).map_err(|e| e.to_string())?;
            let fpsi = match &f {
                TargetFunction::Tabulated { values } => {
                    common::apply_tabulated(&oracle, q.measure().atoms(), values, inst.psi.as_slice())
                }
                _ => oracle.apply(&|l| f.eval(l).unwrap(), inst.psi.as_slice()),
            };
            let lhs: f64 = exp.coeffs().iter().map(|c| c.norm_sqr()).sum();
            let rhs = common::norm(&fpsi).powi(2);
            let rel = (lhs - rhs).abs() / rhs.max(f64::MIN_POSITIVE);
            parseval_worst = parseval_worst.max(rel);
            ensure!(rel <= 1e-10, "{} {}: Parseval relative gap {rel:e}", inst.label, f.name());
        }
    }
    let mut trials = 0;
    let mut min_margin = f64::INFINITY;
    for i in 0..40u64 {
        let dim = 3 + (i as usize % 6);
        let h = random_hermitian(dim, 21_000 + i, 0.0).unwrap();
        let psi = random_state(dim, 22_000 + i).unwrap();
        let q = StateAwareQuery::new(&h, &psi).map_err(|e| e.to_string())?;
        let f = TargetFunction::TimeEvolution { t: 0.5 + 0.1 * i as f64 };
        let exp = q.expand(&f).map_err(|e| e.to_string())?;
        let mu = q.measure();
        let fv = f.values_on(mu).unwrap();
        let mut rng = random::rng(23_000 + i);
        for _ in 0..30 {
            use rand::Rng;
            let d = rng.gen_range(0..exp.len());
            let pd: Vec<C64> = mu.atoms().iter().map(|&x| exp.eval_truncation(d, x).unwrap()).collect();
            let scale = 10f64.powf(rng.gen_range(-8.0..0.5));
            let coeffs: Vec<C64> = (0..=d)
                .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale)
                .collect();
            let err: f64 = mu
                .atoms()
                .iter()
                .zip(mu.weights())
                .zip(fv.iter().zip(&pd))
                .map(|((&x, &w), (fx, px))| {
                    let delta: C64 = coeffs.iter().rev().fold(C64::new(0.0, 0.0), |acc, c| acc * x + c);
                    w * (fx - px - delta).norm_sqr()
                })
                .sum::<f64>()
                .sqrt();
            let margin = err - exp.tail_error(d).unwrap();
            min_margin = min_margin.min(margin);
            ensure!(margin >= -1e-12, "random degree-{d} polynomial beat p_d by {margin:e}");
            trials += 1;
        }
    }
    ensure!(trials >= 1000, "only {trials} optimality trials");
    Ok(format!(
        "Parseval max relative gap {parseval_worst:.1e}; {trials} random competitors, min margin {min_margin:.1e}"
    ))
}

fn criterion_7() -> Verdict {
    let spectrum = common::snapped_logspace();
    let a = HermitianOperator::diagonal(&spectrum).unwrap();
    let occupied = |kappa: f64| -> StateVector {
        let amps: Vec<f64> = spectrum
            .iter()
            .map(|&x| if x >= 1.0 / kappa - 1e-15 { 1.0 } else { 0.0 })
            .collect();
        StateVector::from_real(&amps).unwrap()
    };
    let b = occupied(10.0);
    let r = hhl_analysis(&a, &b, 1e-3).map_err(|e| e.to_string())?.report;
    let wc = r.worst_case_degree.ok_or("worst-case degree missing from report")?;
    let keff = r.kappa_eff.ok_or("kappa_eff missing")?;
    let kglob = r.kappa_global.ok_or("kappa_global missing")?;
    ensure!((keff - 10.0).abs() < 1e-6, "kappa_eff {keff}");
    ensure!((kglob - 100.0).abs() < 1e-6, "kappa_global {kglob}");
    ensure!(r.n_mu < wc, "n_mu {} not below worst-case {wc}", r.n_mu);

    let kappas = [2.0, 5.0, 10.0, 20.0];
    let epss = [1e-2, 1e-4, 1e-6];
    let mut table = vec![vec![0usize; kappas.len()]; epss.len()];
    for (j, &kappa) in kappas.iter().enumerate() {
        let state = occupied(kappa);
        let q = StateAwareQuery::new(&a, &state).map_err(|e| e.to_string())?;
        for (i, &eps) in epss.iter().enumerate() {
            table[i][j] = q.run(&TargetFunction::Inverse, eps).map_err(|e| e.to_string())?.report.n_mu;
        }
    }
    for (i, row) in table.iter().enumerate() {
        ensure!(row.windows(2).all(|w| w[0] <= w[1]), "not monotone in kappa_eff at eps {}: {row:?}", epss[i]);
    }
    for j in 0..kappas.len() {
        let col: Vec<usize> = table.iter().map(|r| r[j]).collect();
        ensure!(col.windows(2).all(|w| w[0] <= w[1]), "not monotone in log(1/eps) at kappa {}: {col:?}", kappas[j]);
    }
    Ok(format!(
        "n_mu {} vs worst-case {wc} (kappa_eff {keff:.3}, kappa_global {kglob:.1}); \
         sweep over kappa_eff {{2,5,10,20}}: eps 1e-2 {:?}, 1e-4 {:?}, 1e-6 {:?}",
        r.n_mu, table[0], table[1], table[2]
    ))
}

fn criterion_8() -> Verdict {
    let h = HermitianOperator::diagonal(&[1.0, 2.0, 3.0, 4.0]).unwrap();
    let s1 = StateVector::from_real(&[1.0, 1.0, 0.0, 0.0]).unwrap();
    let s2 = StateVector::from_real(&[0.0, 0.0, 1.0, 1.0]).unwrap();
    let fam = StateFamily::new(vec![s1.clone(), s2]).unwrap();
    let d = family_decompose(&h, &fam, DEFAULT_RANK_TOL).map_err(|e| e.to_string())?;
    let sum: usize = d.per_state_dims.iter().sum();
    ensure!(d.m_fam() == 4 && sum == 4, "m_fam {} vs sum {sum}", d.m_fam());
    let f = TargetFunction::TimeEvolution { t: 0.9 };
    for c in [FamilyCriterion::MaxState, FamilyCriterion::Averaged] {
        let q = family_query_complexity(&h, &fam, &f, 0.0, c).map_err(|e| e.to_string())?;
        ensure!(q == d.m_fam() - 1, "{c:?}: Q_fam(0) = {q}");
    }

    let chain = HermitianOperator::tight_binding(&[0.1, -0.2, 0.0, 0.3, 0.05, -0.1], &[1.0, 0.8, 1.1, 0.9, 1.2]).unwrap();
    let psi = random_state(6, 31).unwrap();
    let twins = StateFamily::new(vec![psi.clone(), psi.clone()]).unwrap();
    let dt = family_decompose(&chain, &twins, DEFAULT_RANK_TOL).map_err(|e| e.to_string())?;
    ensure!(dt.m_fam() == dt.per_state_dims[0], "identical states: m_fam {} vs m_1 {}", dt.m_fam(), dt.per_state_dims[0]);

    let single = StateFamily::new(vec![psi.clone()]).unwrap();
    let ds = family_decompose(&chain, &single, DEFAULT_RANK_TOL).map_err(|e| e.to_string())?;
    let k = lanczos_decompose(&chain, &psi, None).unwrap();
    ensure!(ds.basis.as_slice() == k.basis(), "r=1 basis differs from the Lanczos basis");
    ensure!(ds.compressed == k.jacobi().to_dense(), "r=1 compressed matrix differs from J");
    let q = StateAwareQuery::new(&chain, &psi).unwrap();
    for f in [TargetFunction::TimeEvolution { t: 1.3 }, TargetFunction::GaussianFilter { center: 0.0, width: 0.7 }] {
        let exp = q.expand(&f).unwrap();
        for eps in [0.0, 1e-6, 1e-3, 1e-1] {
            let single_q = degree_functional(&exp, eps);
            for c in [FamilyCriterion::MaxState, FamilyCriterion::Averaged] {
                let fq = family_query_complexity(&chain, &single, &f, eps, c).map_err(|e| e.to_string())?;
                ensure!(fq == single_q, "r=1 {c:?} eps={eps}: {fq} vs {single_q}");
            }
        }
    }
    Ok(format!(
        "disjoint m_fam 4 = 2 + 2, Q_fam(0) = 3 under both criteria; identical m_fam = {}; r=1 path identical",
        dt.m_fam()
    ))
}

fn criterion_9() -> Verdict {
    let h = random_hermitian(12, 41, 0.0).unwrap();
    let psi = random_state(12, 42).unwrap();
    let k = lanczos_decompose(&h, &psi, None).unwrap();
    let mu = measure_from_decomposition(&k).unwrap();
    let oracle = Oracle::new(&h);
    let mut norm_worst = 0.0f64;
    let mut s_worst = 0.0f64;
    for t in linspace(0.0, 20.0, 50) {
        let st = evolve_chain(&k, t).map_err(|e| e.to_string())?;
        norm_worst = norm_worst.max((st.norm_sqr() - 1.0).abs());
        // S(t) in the <psi(t)|psi0> sense equals psi_0(t)^*.
        let back = inner(&oracle.evolve(psi.as_slice(), t), psi.as_slice());
        s_worst = s_worst.max((st.amplitudes[0].conj() - back).norm());
        s_worst = s_worst.max((st.amplitudes[0] - mu.survival_amplitude(t)).norm());
    }
    ensure!(norm_worst <= 1e-10, "norm drift {norm_worst:e}");
    ensure!(s_worst <= 1e-9, "psi_0(t) vs S(t) gap {s_worst:e}");
    let c0 = mean_position(&evolve_chain(&k, 0.0).unwrap());
    ensure!(c0 == 0.0, "C(0) = {c0}");

    let a = vec![0.0; 64];
    let b = vec![1.0; 63];
    let times = linspace(0.0, 100.0, 201);
    let zero = DisorderSpec { strength_a: 0.0, strength_b: 0.0, seed: 5 };
    let z = disorder_experiment(&a, &b, &zero, &times).map_err(|e| e.to_string())?;
    ensure!(z.clean == z.disordered, "zero-strength disorder changed the curve");
    let spec = DisorderSpec { strength_a: 2.0, strength_b: 0.0, seed: 2024 };
    let r1 = disorder_experiment(&a, &b, &spec, &times).map_err(|e| e.to_string())?;
    let r2 = disorder_experiment(&a, &b, &spec, &times).map_err(|e| e.to_string())?;
    ensure!(r1.disordered == r2.disordered, "disorder run not deterministic");
    let other = disorder_experiment(&a, &b, &DisorderSpec { seed: 2025, ..spec }, &times).unwrap();
    ensure!(other.disordered != r1.disordered, "different seeds gave identical curves");
    let clean = window_average(&times, &r1.clean, 50.0, 100.0).unwrap();
    let dirty = window_average(&times, &r1.disordered, 50.0, 100.0).unwrap();
    Ok(format!(
        "norm drift {norm_worst:.1e}, psi_0(t)/S(t) gap {s_worst:.1e}, C(0) = 0; \
         observed 64-site window average C over [50, 100]: clean {clean:.2}, strength_a 2 {dirty:.2}"
    ))
}

fn scenario_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn run_corpus(out: &Path) -> Result<Vec<String>, String> {
    let mut configs: Vec<PathBuf> = std::fs::read_dir(scenario_dir())
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "json"))
        .collect();
    configs.sort();
    let mut modes = Vec::new();
    for cfg in &configs {
        let o = Command::new(env!("CARGO_BIN_EXE_kq"))
            .args(["run", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--format", "both"])
            .output()
            .map_err(|e| e.to_string())?;
        ensure!(
            o.status.code() == Some(0),
            "{} exited with {:?}: {}",
            cfg.display(),
            o.status.code(),
            String::from_utf8_lossy(&o.stdout)
        );
        let text = std::fs::read_to_string(cfg).unwrap();
        let parsed: serde_json::Value = serde_json::from_str(&text).unwrap();
        for s in parsed["scenarios"].as_array().unwrap() {
            modes.push(s["mode"]["kind"].as_str().unwrap().to_string());
        }
    }
    ensure!(configs.len() >= 6, "only {} configs in the corpus", configs.len());
    Ok(modes)
}

fn criterion_10() -> Verdict {
    let start = Instant::now();
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let first = tmp.path().join("first");
    let second = tmp.path().join("second");
    let modes = run_corpus(&first)?;
    run_corpus(&second)?;
    let secs = start.elapsed().as_secs_f64();
    for m in ["duality", "hhl", "dynamics", "family", "disorder"] {
        ensure!(modes.iter().any(|x| x == m), "no scenario covers mode {m}");
    }
    let mut compared = 0;
    for entry in std::fs::read_dir(&first).unwrap() {
        let p = entry.unwrap().path();
        let name = p.file_name().unwrap().to_string_lossy().into_owned();
        if name.ends_with(".timings.json") {
            continue;
        }
        let a = std::fs::read(&p).unwrap();
        let b = std::fs::read(second.join(&name)).map_err(|e| format!("{name}: {e}"))?;
        ensure!(a == b, "{name} differs between runs");
        compared += 1;
    }
    ensure!(secs < 60.0, "corpus took {secs:.1} s twice over");
    Ok(format!(
        "{} scenarios over 5 modes, exit 0, {compared} output files bitwise identical on rerun, {secs:.2} s for both runs",
        modes.len()
    ))
}

fn main() {
    let criteria: [(&str, fn() -> Verdict); 10] = [
        ("duality theorem suite", criterion_1),
        ("operational certificate", criterion_2),
        ("generic target needs degree m-1", criterion_3),
        ("compression exactness", criterion_4),
        ("measure transforms", criterion_5),
        ("Parseval and optimality", criterion_6),
        ("state-aware linear solving", criterion_7),
        ("family suite", criterion_8),
        ("chain physics", criterion_9),
        ("end-to-end CLI", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let verdict = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match verdict {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.2} s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{secs:.2} s]", i + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
