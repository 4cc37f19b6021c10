//! Scenario runner behind the `kq` binary.

pub mod config;

use std::fs;
use std::path::Path;
use std::time::Instant;

use log::{debug, info, warn};
use rayon::prelude::*;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub use config::{load_config, parse_config, ConfigError, ConfigFile, ScenarioConfig};
use config::{FunctionSpec, ModeSpec};

use crate::duality::{hhl_analysis, run_duality_scenario, DualityOutcome, QueryReport, StateAwareQuery};
use crate::dynamics::{disorder_experiment, mean_position, window_average, ChainPropagator, DisorderSpec};
use crate::error::{KrylovError, Result};
use crate::family::{family_decompose, family_query_complexity, FamilyCriterion, StateFamily};
use crate::favard::TargetFunction;
use crate::lanczos::{lanczos_decompose, KrylovDecomposition};
use crate::linalg::{distance, eig_hermitian_dense, norm, HermitianOperator, StateVector, C64};
use crate::measure::{measure_from_decomposition, DiscreteMeasure};

pub const SCHEMA_VERSION: u32 = 1;
pub const TOOLKIT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Json,
    Csv,
    Both,
}

impl OutputFormat {
    fn writes_csv(self) -> bool {
        !matches!(self, OutputFormat::Json)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorRecord {
    pub kind: String,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct LanczosRecord {
    pub krylov_dim: usize,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeasureRecord {
    pub atoms: Vec<f64>,
    pub weights: Vec<f64>,
}

impl From<&DiscreteMeasure> for MeasureRecord {
    fn from(mu: &DiscreteMeasure) -> Self {
        MeasureRecord {
            atoms: mu.atoms().to_vec(),
            weights: mu.weights().to_vec(),
        }
    }
}

#[derive(Clone, Debug, Default, Serialize)]
pub struct Curves {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tail_curve: Option<Vec<(usize, f64)>>,
    /// `(t, C(t))`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_position: Option<Vec<(f64, f64)>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DynamicsRecord {
    pub times: Vec<f64>,
    pub mean_position: Vec<f64>,
    /// `S(t) = sum_i w_i exp(-i lambda_i t)` as `[re, im]`.
    pub survival_amplitude: Vec<[f64; 2]>,
    /// Largest `|sum_n |psi_n|^2 - 1|` over the grid.
    pub max_norm_drift: f64,
    /// Largest `||exp(-iHt)psi0 - V exp(-iJt) e_1||` over the grid.
    pub max_state_equality_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct FamilyRecord {
    pub members: usize,
    pub m_fam: usize,
    pub per_state_dims: Vec<usize>,
    pub criterion: FamilyCriterion,
    pub q_opt: usize,
    pub q_max_state: usize,
    pub q_averaged: usize,
    /// Largest `|V^dag H V - (V^dag H V)^dag|` entry.
    pub compressed_hermitian_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct DisorderRecord {
    pub spec: DisorderSpec,
    pub times: Vec<f64>,
    pub clean: Vec<f64>,
    pub disordered: Vec<f64>,
    pub window: (f64, f64),
    pub clean_window_average: Option<f64>,
    pub disordered_window_average: Option<f64>,
    /// Clean minus disordered window average; positive when disorder
    /// suppresses spreading.
    pub localization_gap: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReportRecord {
    pub schema_version: u32,
    pub toolkit_version: &'static str,
    pub scenario: String,
    pub mode: &'static str,
    pub config_hash: String,
    pub status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<ErrorRecord>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub invariant_violations: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub query: Option<QueryReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure: Option<MeasureRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lanczos: Option<LanczosRecord>,
    pub curves: Curves,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dynamics: Option<DynamicsRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilyRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub disorder: Option<DisorderRecord>,
}

impl ReportRecord {
    pub fn is_ok(&self) -> bool {
        self.error.is_none() && self.invariant_violations.is_empty()
    }

    fn empty(cfg: &ScenarioConfig) -> Self {
        ReportRecord {
            schema_version: SCHEMA_VERSION,
            toolkit_version: TOOLKIT_VERSION,
            scenario: cfg.name.clone(),
            mode: cfg.mode.name(),
            config_hash: config_hash(cfg),
            status: "ok",
            error: None,
            invariant_violations: Vec::new(),
            query: None,
            measure: None,
            lanczos: None,
            curves: Curves::default(),
            dynamics: None,
            family: None,
            disorder: None,
        }
    }
}

/// SHA-256 of the scenario re-serialized in canonical field order.
pub fn config_hash(cfg: &ScenarioConfig) -> String {
    let canonical = serde_json::to_vec(cfg).expect("scenario config serializes");
    hex::encode(Sha256::digest(&canonical))
}

fn lanczos_record(k: &KrylovDecomposition) -> LanczosRecord {
    LanczosRecord {
        krylov_dim: k.m(),
        a: k.a().to_vec(),
        b: k.b().to_vec(),
    }
}

fn target_for(spec: &FunctionSpec, h: &HermitianOperator, psi: &StateVector) -> Result<TargetFunction> {
    let atoms = match spec {
        FunctionSpec::Tabulated { seed: Some(_), .. } => StateAwareQuery::new(h, psi)?.measure().len(),
        _ => 0,
    };
    spec.build(atoms)
}

fn attach_query(record: &mut ReportRecord, outcome: DualityOutcome) {
    if let Err(v) = outcome.report.check_invariants() {
        record.invariant_violations.push(v);
    }
    // L2(mu) against sup norm, so this can fail legitimately. Logged only.
    if let Some(wc) = outcome.report.worst_case_degree {
        if outcome.report.n_mu > wc {
            warn!(
                "{}: n_mu {} exceeds worst-case degree {wc}",
                record.scenario, outcome.report.n_mu
            );
        }
    }
    record.curves.tail_curve = Some(outcome.report.tail_curve.clone());
    record.measure = Some(MeasureRecord::from(&outcome.measure));
    record.lanczos = Some(lanczos_record(&outcome.krylov));
    record.query = Some(outcome.report);
}

/// Runs one scenario. Errors are returned for the caller to record.
fn execute(cfg: &ScenarioConfig, record: &mut ReportRecord) -> Result<()> {
    // Building first lets dimension errors surface with their own kind.
    let h = cfg.operator.build()?;
    let psi = cfg.state.build(h.dim())?;
    let problems = cfg.problems();
    if !problems.is_empty() {
        return Err(KrylovError::InvalidArgument(problems.join("; ")));
    }
    let eps = cfg.epsilon;

    match &cfg.mode {
        ModeSpec::Duality => {
            let spec = cfg.function.as_ref().expect("checked by problems()");
            let f = target_for(spec, &h, &psi)?;
            attach_query(record, run_duality_scenario(&h, &psi, &f, eps)?);
        }
        ModeSpec::Hhl => attach_query(record, hhl_analysis(&h, &psi, eps)?),
        ModeSpec::Dynamics { t_grid } => {
            let times = t_grid.times();
            let k = lanczos_decompose(&h, &psi, None)?;
            let mu = measure_from_decomposition(&k)?;
            let prop = ChainPropagator::new(k.jacobi())?;
            let dense = eig_hermitian_dense(&h)?;
            let mut c = Vec::with_capacity(times.len());
            let mut s = Vec::with_capacity(times.len());
            let mut drift = 0.0f64;
            let mut equality = 0.0f64;
            for &t in &times {
                let state = prop.evolve(t);
                drift = drift.max((norm(&state.amplitudes).powi(2) - 1.0).abs());
                let lifted = k.apply_isometry(&state.amplitudes)?;
                let full = dense.apply_function(|x| C64::from_polar(1.0, -x * t), psi.as_slice());
                equality = equality.max(distance(&lifted, &full));
                c.push(mean_position(&state));
                let st = mu.survival_amplitude(t);
                s.push([st.re, st.im]);
            }
            record.curves.mean_position = Some(times.iter().copied().zip(c.iter().copied()).collect());
            record.dynamics = Some(DynamicsRecord {
                times,
                mean_position: c,
                survival_amplitude: s,
                max_norm_drift: drift,
                max_state_equality_error: equality,
            });
            if drift > 1e-10 {
                record.invariant_violations.push(format!("chain norm drift {drift:e} exceeds 1e-10"));
            }
            if equality > 1e-9 {
                record
                    .invariant_violations
                    .push(format!("state equality error {equality:e} exceeds 1e-9"));
            }
            record.measure = Some(MeasureRecord::from(&mu));
            record.lanczos = Some(lanczos_record(&k));
            if let Some(spec) = &cfg.function {
                let f = target_for(spec, &h, &psi)?;
                attach_query(record, run_duality_scenario(&h, &psi, &f, eps)?);
            }
        }
        ModeSpec::Family {
            additional_states,
            criterion,
            rank_tol,
        } => {
            let spec = cfg.function.as_ref().expect("checked by problems()");
            let mut states = vec![psi.clone()];
            for s in additional_states {
                states.push(s.build(h.dim())?);
            }
            let fam = StateFamily::new(states)?;
            let f = target_for(spec, &h, &psi)?;
            let decomposition = family_decompose(&h, &fam, *rank_tol)?;
            let q_max_state = family_query_complexity(&h, &fam, &f, eps, FamilyCriterion::MaxState)?;
            let q_averaged = family_query_complexity(&h, &fam, &f, eps, FamilyCriterion::Averaged)?;
            let criterion = FamilyCriterion::from(*criterion);
            let q_opt = match criterion {
                FamilyCriterion::MaxState => q_max_state,
                FamilyCriterion::Averaged => q_averaged,
            };
            let sum: usize = decomposition.per_state_dims.iter().sum();
            if decomposition.m_fam() > sum || decomposition.m_fam() > h.dim() {
                record
                    .invariant_violations
                    .push(format!("m_fam {} exceeds its bounds", decomposition.m_fam()));
            }
            record.family = Some(FamilyRecord {
                members: fam.len(),
                m_fam: decomposition.m_fam(),
                per_state_dims: decomposition.per_state_dims.clone(),
                criterion,
                q_opt,
                q_max_state,
                q_averaged,
                compressed_hermitian_deviation: decomposition.compressed.hermitian_deviation(),
            });
            attach_query(record, run_duality_scenario(&h, &psi, &f, eps)?);
        }
        ModeSpec::Disorder {
            strength_a,
            strength_b,
            seed,
            t_grid,
            window,
        } => {
            let times = t_grid.times();
            let k = lanczos_decompose(&h, &psi, None)?;
            let spec = DisorderSpec {
                strength_a: *strength_a,
                strength_b: *strength_b,
                seed: *seed,
            };
            let curves = disorder_experiment(k.a(), k.b(), &spec, &times)?;
            let t_max = times.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let t_min = times.iter().copied().fold(f64::INFINITY, f64::min);
            let (lo, hi) = window.map_or((0.5 * (t_min + t_max), t_max), |[lo, hi]| (lo, hi));
            let clean_avg = window_average(&times, &curves.clean, lo, hi);
            let dirty_avg = window_average(&times, &curves.disordered, lo, hi);
            let gap = clean_avg.zip(dirty_avg).map(|(c, d)| c - d);
            if let Some(g) = gap {
                info!("{}: localization gap {g:.4} over t in [{lo}, {hi}]", cfg.name);
            }
            record.curves.mean_position =
                Some(times.iter().copied().zip(curves.disordered.iter().copied()).collect());
            record.measure = Some(MeasureRecord::from(&measure_from_decomposition(&k)?));
            record.lanczos = Some(lanczos_record(&k));
            record.disorder = Some(DisorderRecord {
                spec,
                times: curves.times,
                clean: curves.clean,
                disordered: curves.disordered,
                window: (lo, hi),
                clean_window_average: clean_avg,
                disordered_window_average: dirty_avg,
                localization_gap: gap,
            });
            if let Some(fspec) = &cfg.function {
                let f = target_for(fspec, &h, &psi)?;
                attach_query(record, run_duality_scenario(&h, &psi, &f, eps)?);
            }
        }
    }
    Ok(())
}

/// Runs one scenario into a report, capturing any error in the record.
pub fn run_scenario(cfg: &ScenarioConfig) -> ReportRecord {
    let mut record = ReportRecord::empty(cfg);
    if let Err(e) = execute(cfg, &mut record) {
        warn!("{}: {e}", cfg.name);
        record.error = Some(ErrorRecord {
            kind: e.kind().to_string(),
            message: e.to_string(),
        });
    }
    for v in &record.invariant_violations {
        warn!("{}: invariant violated: {v}", cfg.name);
    }
    if !record.is_ok() {
        record.status = "error";
    }
    record
}

#[derive(Debug)]
pub struct RunSummary {
    pub reports: Vec<ReportRecord>,
    pub timings_ms: Vec<(String, f64)>,
}

impl RunSummary {
    pub fn all_ok(&self) -> bool {
        self.reports.iter().all(ReportRecord::is_ok)
    }
}

/// Runs every scenario concurrently; results keep config order.
pub fn run_all(cfg: &ConfigFile, seed_override: Option<u64>) -> RunSummary {
    let scenarios: Vec<ScenarioConfig> = cfg
        .scenarios
        .iter()
        .cloned()
        .map(|mut s| {
            if let Some(seed) = seed_override {
                s.override_seeds(seed);
            }
            s
        })
        .collect();
    let results: Vec<(ReportRecord, f64)> = scenarios
        .par_iter()
        .map(|s| {
            debug!("starting scenario {}", s.name);
            let start = Instant::now();
            let r = run_scenario(s);
            let ms = start.elapsed().as_secs_f64() * 1e3;
            info!("{} finished in {ms:.1} ms ({})", s.name, r.status);
            (r, ms)
        })
        .collect();
    let timings_ms = results
        .iter()
        .map(|(r, ms)| (r.scenario.clone(), *ms))
        .collect();
    RunSummary {
        reports: results.into_iter().map(|(r, _)| r).collect(),
        timings_ms,
    }
}

fn write_csv(path: &Path, header: &str, rows: impl Iterator<Item = String>) -> std::io::Result<()> {
    let mut text = String::from(header);
    text.push('\n');
    for row in rows {
        text.push_str(&row);
        text.push('\n');
    }
    fs::write(path, text)
}

/// Writes `<name>.report.json` per scenario, optional CSV curves and a
/// `<label>.timings.json` sidecar holding wall-clock times, which are kept
/// out of the reports so that reruns are bitwise identical.
pub fn write_outputs(
    summary: &RunSummary,
    out_dir: &Path,
    format: OutputFormat,
    label: &str,
) -> std::io::Result<()> {
    fs::create_dir_all(out_dir)?;
    for r in &summary.reports {
        let json = serde_json::to_string_pretty(r).map_err(std::io::Error::other)?;
        fs::write(out_dir.join(format!("{}.report.json", r.scenario)), json + "\n")?;
        if !format.writes_csv() {
            continue;
        }
        if let Some(tail) = &r.curves.tail_curve {
            write_csv(
                &out_dir.join(format!("{}.tail_curve.csv", r.scenario)),
                "degree,tail_error",
                tail.iter().map(|(d, e)| format!("{d},{e:e}")),
            )?;
        }
        if let Some(d) = &r.disorder {
            write_csv(
                &out_dir.join(format!("{}.mean_position.csv", r.scenario)),
                "t,clean,disordered",
                (0..d.times.len()).map(|i| format!("{},{},{}", d.times[i], d.clean[i], d.disordered[i])),
            )?;
        } else if let Some(c) = &r.curves.mean_position {
            write_csv(
                &out_dir.join(format!("{}.mean_position.csv", r.scenario)),
                "t,mean_position",
                c.iter().map(|(t, v)| format!("{t},{v}")),
            )?;
        }
    }
    let timings: serde_json::Map<String, serde_json::Value> = summary
        .timings_ms
        .iter()
        .map(|(n, ms)| (n.clone(), serde_json::json!({ "wall_time_ms": ms })))
        .collect();
    fs::write(
        out_dir.join(format!("{label}.timings.json")),
        serde_json::to_string_pretty(&timings).map_err(std::io::Error::other)? + "\n",
    )
}
