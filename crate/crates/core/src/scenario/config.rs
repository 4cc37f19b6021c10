//! Scenario files: strict JSON with complex scalars as `[re, im]` pairs.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{KrylovError, Result};
use crate::family::FamilyCriterion;
use crate::favard::TargetFunction;
use crate::linalg::{assert_hermitian, CMatrix, HermitianOperator, StateVector, C64};
use crate::random;

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub scenarios: Vec<ScenarioConfig>,
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub name: String,
    pub operator: OperatorSpec,
    pub state: StateSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub function: Option<FunctionSpec>,
    #[serde(default)]
    pub epsilon: f64,
    pub mode: ModeSpec,
}

/// `[re, im]`, or a bare real number.
#[derive(Clone, Copy, Debug, Deserialize, Serialize, PartialEq)]
#[serde(untagged)]
pub enum Complex {
    Pair([f64; 2]),
    Real(f64),
}

impl Complex {
    pub fn value(self) -> C64 {
        match self {
            Complex::Pair([re, im]) => C64::new(re, im),
            Complex::Real(re) => C64::new(re, 0.0),
        }
    }
}

/// A scalar broadcast to every site, or one value per site.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum SiteValues {
    Scalar(f64),
    List(Vec<f64>),
}

impl SiteValues {
    fn expand(&self, len: usize, field: &str) -> std::result::Result<Vec<f64>, String> {
        match self {
            SiteValues::Scalar(v) => Ok(vec![*v; len]),
            SiteValues::List(v) if v.len() == len => Ok(v.clone()),
            SiteValues::List(v) => Err(format!("{field} has {} entries, expected {len}", v.len())),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum OperatorSpec {
    Dense {
        matrix: Vec<Vec<Complex>>,
    },
    Diagonal {
        values: Vec<f64>,
    },
    TightBinding {
        sites: usize,
        onsite: SiteValues,
        hopping: SiteValues,
    },
    RandomHermitian {
        dim: usize,
        seed: u64,
        #[serde(default)]
        shift: f64,
    },
}

impl OperatorSpec {
    pub fn dim(&self) -> usize {
        match self {
            OperatorSpec::Dense { matrix } => matrix.len(),
            OperatorSpec::Diagonal { values } => values.len(),
            OperatorSpec::TightBinding { sites, .. } => *sites,
            OperatorSpec::RandomHermitian { dim, .. } => *dim,
        }
    }

    pub fn build(&self) -> Result<HermitianOperator> {
        match self {
            OperatorSpec::Dense { matrix } => {
                let rows = matrix
                    .iter()
                    .map(|r| r.iter().map(|c| c.value()).collect())
                    .collect();
                assert_hermitian(CMatrix::from_rows(rows)?)
            }
            OperatorSpec::Diagonal { values } => HermitianOperator::diagonal(values),
            OperatorSpec::TightBinding {
                sites,
                onsite,
                hopping,
            } => {
                let a = onsite.expand(*sites, "onsite").map_err(KrylovError::InvalidArgument)?;
                let b = hopping
                    .expand(sites.saturating_sub(1), "hopping")
                    .map_err(KrylovError::InvalidArgument)?;
                HermitianOperator::tight_binding(&a, &b)
            }
            OperatorSpec::RandomHermitian { dim, seed, shift } => {
                random::random_hermitian(*dim, *seed, *shift)
            }
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    BasisIndex { index: usize },
    Amplitudes { values: Vec<Complex> },
    Uniform,
    Random { seed: u64 },
}

impl StateSpec {
    pub fn build(&self, dim: usize) -> Result<StateVector> {
        match self {
            StateSpec::BasisIndex { index } => StateVector::basis(dim, *index),
            StateSpec::Amplitudes { values } => {
                if values.len() != dim {
                    return Err(KrylovError::DimensionMismatch {
                        expected: dim,
                        found: values.len(),
                    });
                }
                StateVector::new(values.iter().map(|c| c.value()).collect())
            }
            StateSpec::Uniform => StateVector::uniform(dim),
            StateSpec::Random { seed } => random::random_state(dim, *seed),
        }
    }
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Inverse,
    TimeEvolution {
        t: f64,
    },
    GaussianFilter {
        center: f64,
        width: f64,
    },
    StepFilter {
        threshold: f64,
    },
    Monomial {
        k: u32,
    },
    /// Explicit values at the atoms, or a seed for random values in
    /// `[-1, 1] + i[-1, 1]`, generated once the atom count is known.
    Tabulated {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        values: Option<Vec<Complex>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        seed: Option<u64>,
    },
}

impl FunctionSpec {
    /// `atoms` is the number of atoms of the measure the target lives on.
    pub fn build(&self, atoms: usize) -> Result<TargetFunction> {
        Ok(match self {
            FunctionSpec::Inverse => TargetFunction::Inverse,
            FunctionSpec::TimeEvolution { t } => TargetFunction::TimeEvolution { t: *t },
            FunctionSpec::GaussianFilter { center, width } => TargetFunction::GaussianFilter {
                center: *center,
                width: *width,
            },
            FunctionSpec::StepFilter { threshold } => TargetFunction::StepFilter {
                threshold: *threshold,
            },
            FunctionSpec::Monomial { k } => TargetFunction::Monomial { k: *k },
            FunctionSpec::Tabulated { values, seed } => match (values, seed) {
                (Some(v), None) => TargetFunction::Tabulated {
                    values: v.iter().map(|c| c.value()).collect(),
                },
                (None, Some(s)) => TargetFunction::Tabulated {
                    values: random::tabulated_values(atoms, *s),
                },
                _ => {
                    return Err(KrylovError::InvalidArgument(
                        "tabulated needs exactly one of values or seed".into(),
                    ))
                }
            },
        })
    }

    pub fn is_inverse(&self) -> bool {
        matches!(self, FunctionSpec::Inverse)
    }
}

/// An explicit list of times, or `points` samples from `start` to `stop`.
#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(untagged)]
pub enum TimeGrid {
    List(Vec<f64>),
    Range { start: f64, stop: f64, points: usize },
}

impl TimeGrid {
    pub fn times(&self) -> Vec<f64> {
        match self {
            TimeGrid::List(v) => v.clone(),
            TimeGrid::Range {
                start,
                stop,
                points,
            } => crate::dynamics::linspace(*start, *stop, *points),
        }
    }
}

fn default_rank_tol() -> f64 {
    crate::family::DEFAULT_RANK_TOL
}

#[derive(Clone, Debug, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeSpec {
    Duality,
    Hhl,
    Dynamics {
        t_grid: TimeGrid,
    },
    Family {
        additional_states: Vec<StateSpec>,
        #[serde(default)]
        criterion: CriterionSpec,
        #[serde(default = "default_rank_tol")]
        rank_tol: f64,
    },
    Disorder {
        strength_a: f64,
        strength_b: f64,
        seed: u64,
        t_grid: TimeGrid,
        /// Time window for the averaged mean position; defaults to the
        /// second half of the grid.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        window: Option<[f64; 2]>,
    },
}

impl ModeSpec {
    pub fn name(&self) -> &'static str {
        match self {
            ModeSpec::Duality => "duality",
            ModeSpec::Hhl => "hhl",
            ModeSpec::Dynamics { .. } => "dynamics",
            ModeSpec::Family { .. } => "family",
            ModeSpec::Disorder { .. } => "disorder",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, Deserialize, Serialize, PartialEq, Eq)]
#[serde(rename_all = "snake_case")]
pub enum CriterionSpec {
    #[default]
    MaxState,
    Averaged,
}

impl From<CriterionSpec> for FamilyCriterion {
    fn from(c: CriterionSpec) -> Self {
        match c {
            CriterionSpec::MaxState => FamilyCriterion::MaxState,
            CriterionSpec::Averaged => FamilyCriterion::Averaged,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error at `{path}` (line {line}, column {column}): {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
}

pub fn parse_config(text: &str) -> std::result::Result<ConfigFile, ConfigError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ConfigError::Parse {
            path,
            line: inner.line(),
            column: inner.column(),
            message: inner.to_string(),
        }
    })
}

pub fn load_config(path: &Path) -> std::result::Result<ConfigFile, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_config(&text)
}

fn check_times(t: &TimeGrid, field: &str, problems: &mut Vec<String>) {
    let times = t.times();
    if times.is_empty() {
        problems.push(format!("{field} is empty"));
    }
    if times.iter().any(|x| !x.is_finite()) {
        problems.push(format!("{field} contains a non-finite time"));
    }
}

fn check_state(s: &StateSpec, dim: usize, field: &str, problems: &mut Vec<String>) {
    match s {
        StateSpec::BasisIndex { index } if *index >= dim => {
            problems.push(format!("{field}.index {index} out of range for dimension {dim}"))
        }
        StateSpec::Amplitudes { values } if values.len() != dim => problems.push(format!(
            "{field}.values has {} entries, operator dimension is {dim}",
            values.len()
        )),
        StateSpec::Amplitudes { values } if values.iter().all(|c| c.value().norm() == 0.0) => {
            problems.push(format!("{field}.values is the zero vector"))
        }
        _ => {}
    }
}

impl ScenarioConfig {
    /// Static checks that need no spectral computation. Each entry names the
    /// offending field.
    pub fn problems(&self) -> Vec<String> {
        let mut p = Vec::new();
        let valid_name = !self.name.is_empty()
            && self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || matches!(c, '_' | '-' | '.'));
        if !valid_name {
            p.push(format!(
                "name {:?} must be nonempty and use only [A-Za-z0-9_.-]",
                self.name
            ));
        }
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite()) {
            p.push(format!("epsilon must be finite and >= 0, got {}", self.epsilon));
        }
        let dim = self.operator.dim();
        if dim == 0 {
            p.push("operator dimension must be positive".into());
        }
        match &self.operator {
            OperatorSpec::Dense { matrix } => {
                if let Some(r) = matrix.iter().position(|r| r.len() != dim) {
                    p.push(format!("operator.matrix row {r} has the wrong length"));
                } else if dim > 0 {
                    let rows = matrix
                        .iter()
                        .map(|r| r.iter().map(|c| c.value()).collect())
                        .collect();
                    if let Err(e) = CMatrix::from_rows(rows).and_then(assert_hermitian) {
                        p.push(format!("operator.matrix: {e}"));
                    }
                }
            }
            OperatorSpec::Diagonal { values } => {
                if values.iter().any(|v| !v.is_finite()) {
                    p.push("operator.values must be finite".into());
                }
            }
            OperatorSpec::TightBinding {
                sites,
                onsite,
                hopping,
            } => {
                if let Err(e) = onsite.expand(*sites, "operator.onsite") {
                    p.push(e);
                }
                if let Err(e) = hopping.expand(sites.saturating_sub(1), "operator.hopping") {
                    p.push(e);
                }
            }
            OperatorSpec::RandomHermitian { shift, .. } => {
                if !shift.is_finite() {
                    p.push("operator.shift must be finite".into());
                }
            }
        }
        check_state(&self.state, dim, "state", &mut p);

        if let Some(FunctionSpec::Tabulated { values, seed }) = &self.function {
            if values.is_some() == seed.is_some() {
                p.push("function: tabulated needs exactly one of values or seed".into());
            }
        }
        if let Some(FunctionSpec::GaussianFilter { width, .. }) = &self.function {
            if !(*width > 0.0) {
                p.push("function.width must be positive".into());
            }
        }
        match &self.mode {
            ModeSpec::Duality | ModeSpec::Family { .. } if self.function.is_none() => {
                p.push(format!("mode {} requires a function", self.mode.name()))
            }
            ModeSpec::Hhl if self.function.as_ref().is_some_and(|f| !f.is_inverse()) => {
                p.push("mode hhl only accepts the inverse function".into())
            }
            _ => {}
        }
        match &self.mode {
            ModeSpec::Dynamics { t_grid } => check_times(t_grid, "mode.t_grid", &mut p),
            ModeSpec::Family {
                additional_states,
                rank_tol,
                ..
            } => {
                if additional_states.is_empty() {
                    p.push("mode.additional_states is empty".into());
                }
                for (i, s) in additional_states.iter().enumerate() {
                    check_state(s, dim, &format!("mode.additional_states[{i}]"), &mut p);
                }
                if !(*rank_tol > 0.0 && *rank_tol < 1.0) {
                    p.push("mode.rank_tol must lie in (0, 1)".into());
                }
            }
            ModeSpec::Disorder {
                strength_a,
                strength_b,
                t_grid,
                window,
                ..
            } => {
                if !(*strength_a >= 0.0 && *strength_b >= 0.0) {
                    p.push("mode disorder strengths must be >= 0".into());
                }
                check_times(t_grid, "mode.t_grid", &mut p);
                if let Some([lo, hi]) = window {
                    if !(lo <= hi) {
                        p.push("mode.window must satisfy lo <= hi".into());
                    }
                }
            }
            _ => {}
        }
        p
    }

    /// Replaces every seed in the scenario.
    pub fn override_seeds(&mut self, seed: u64) {
        fn state(s: &mut StateSpec, seed: u64) {
            if let StateSpec::Random { seed: s } = s {
                *s = seed;
            }
        }
        if let OperatorSpec::RandomHermitian { seed: s, .. } = &mut self.operator {
            *s = seed;
        }
        state(&mut self.state, seed);
        if let Some(FunctionSpec::Tabulated { seed: Some(s), .. }) = &mut self.function {
            *s = seed;
        }
        match &mut self.mode {
            ModeSpec::Family {
                additional_states, ..
            } => additional_states.iter_mut().for_each(|s| state(s, seed)),
            ModeSpec::Disorder { seed: s, .. } => *s = seed,
            _ => {}
        }
    }
}

impl ConfigFile {
    /// Problems across all scenarios, prefixed with the scenario path.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.scenarios.is_empty() {
            out.push("scenarios: no scenarios defined".into());
        }
        let mut seen = HashSet::new();
        for (i, s) in self.scenarios.iter().enumerate() {
            if !seen.insert(s.name.as_str()) {
                out.push(format!("scenarios[{i}]: duplicate name {:?}", s.name));
            }
            out.extend(
                s.problems()
                    .into_iter()
                    .map(|p| format!("scenarios[{i}] ({}): {p}", s.name)),
            );
        }
        out
    }
}
