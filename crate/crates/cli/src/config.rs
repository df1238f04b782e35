//! Experiment configuration: one JSON document per run.
//!
//! Every tunable lives in the config with a documented default, so a
//! config plus a seed reproduces every number in the result files.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use diffusionlab::stability::OdiParams;
use diffusionlab::{Ball, Coefficient, InitialData, Mesh, SolveOptions, WeightPair};

use crate::Failure;

/// Top-level experiment selector. The `kind` field names the experiment;
/// the remaining fields are that experiment's parameters.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentConfig {
    AnalyzeCoefficient(AnalyzeConfig),
    Solve(SolveConfig),
    Front(FrontConfig),
    Stability(StabilityConfig),
    Counterexample(CounterexampleConfig),
    Sweep(SweepConfig),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalyzeConfig {
    pub coefficient: Coefficient,
    #[serde(default)]
    pub conditions: ConditionGrids,
    /// Expected verdicts by condition id; mismatches fail the run.
    #[serde(default)]
    pub expect: std::collections::BTreeMap<String, String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub plot: bool,
}

/// Grids and tolerances for the condition checks.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct ConditionGrids {
    /// Deepest sampled `s` for the boundedness-at-zero check.
    pub s_min: f64,
    /// Shallow end of the grid.
    pub s_max: f64,
    pub per_decade: usize,
    /// Candidate exponents for the quasi-monotonicity check.
    pub mu_grid: Vec<f64>,
    /// Quadrature relative tolerance.
    pub tol: f64,
}

impl Default for ConditionGrids {
    fn default() -> Self {
        Self { s_min: 1e-12, s_max: 1e-1, per_decade: 8, mu_grid: vec![0.5, 1.0, 2.0, 10.0], tol: 1e-9 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SolveConfig {
    pub coefficient: Coefficient,
    pub mesh: Mesh,
    pub initial: InitialData,
    pub output_times: OutputTimes,
    #[serde(default = "default_solver")]
    pub solver: SolveOptions,
    #[serde(default)]
    pub seed: u64,
}

fn default_solver() -> SolveOptions {
    SolveOptions::default()
}

/// Uniformly spaced output times `(end/count, 2·end/count, …, end)`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct OutputTimes {
    pub end: f64,
    pub count: usize,
}

impl OutputTimes {
    pub fn to_vec(self) -> Vec<f64> {
        (1..=self.count).map(|i| self.end * i as f64 / self.count as f64).collect()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrontConfig {
    #[serde(flatten)]
    pub solve: SolveConfig,
    pub ball: Ball,
    pub epsilon: f64,
    /// Support threshold; defaults to `1e-10 · max u0`.
    #[serde(default)]
    pub eps_supp: Option<f64>,
    /// Expected verdict (`finite-speed-consistent` | `immediate-positivity`).
    #[serde(default)]
    pub expect: Option<String>,
    #[serde(default)]
    pub plot: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StabilityConfig {
    #[serde(flatten)]
    pub solve: SolveConfig,
    #[serde(default = "default_weight")]
    pub weight: WeightPair,
    pub functional: FunctionalConfig,
    #[serde(default)]
    pub envelope: Option<EnvelopeConfig>,
    #[serde(default)]
    pub odi: Option<OdiConfig>,
    #[serde(default)]
    pub plot: bool,
}

fn default_weight() -> WeightPair {
    WeightPair::Power { gamma: 0.0, scale: 1.0 }
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FunctionalConfig {
    /// Exponent of `H(u)` in the principal functional (≥ 1).
    pub exponent: f64,
}

/// Basic-model envelope with the explicit rate constant.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnvelopeConfig {
    pub k_coeff: f64,
    pub gamma: f64,
    pub m: f64,
    /// Poincaré–Sobolev constant; 1/2 on the unit interval.
    #[serde(default = "default_c0")]
    pub c0: f64,
    /// Relative dominance slack.
    #[serde(default = "default_slack")]
    pub slack: f64,
    /// Numerically revalidate the `c0 = 1/2` bound (seeded draws) before
    /// using the envelope.
    #[serde(default = "default_true")]
    pub validate_poincare: bool,
}

fn default_c0() -> f64 {
    0.5
}
fn default_slack() -> f64 {
    0.05
}
fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OdiConfig {
    pub params: OdiParams,
    /// Residual slack as a fraction of `max |dY/dt|`.
    #[serde(default = "default_odi_slack")]
    pub slack: f64,
}

fn default_odi_slack() -> f64 {
    0.01
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CounterexampleConfig {
    pub lambda: f64,
    pub dim: u32,
    #[serde(default = "default_ns")]
    pub n_s: usize,
    #[serde(default = "default_nt")]
    pub n_t: usize,
    #[serde(default = "default_residual_threshold")]
    pub residual_threshold: f64,
    #[serde(default)]
    pub conditions: ConditionGrids,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub plot: bool,
}

fn default_ns() -> usize {
    40
}
fn default_nt() -> usize {
    17
}
fn default_residual_threshold() -> f64 {
    1e-10
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    /// Template stability experiment; swept parameters override it.
    pub base: StabilityConfig,
    /// Values of the model degeneracy exponent γ (updates the coefficient
    /// and envelope together).
    #[serde(default)]
    pub gamma: Vec<f64>,
    /// Values of the functional exponent m.
    #[serde(default)]
    pub m: Vec<f64>,
    /// Values of the coefficient scale K.
    #[serde(default)]
    pub k: Vec<f64>,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn seed(&self) -> u64 {
        match self {
            Self::AnalyzeCoefficient(c) => c.seed,
            Self::Solve(c) => c.seed,
            Self::Front(c) => c.solve.seed,
            Self::Stability(c) => c.solve.seed,
            Self::Counterexample(c) => c.seed,
            Self::Sweep(c) => c.seed,
        }
    }

    pub fn set_seed(&mut self, seed: u64) {
        match self {
            Self::AnalyzeCoefficient(c) => c.seed = seed,
            Self::Solve(c) => c.seed = seed,
            Self::Front(c) => c.solve.seed = seed,
            Self::Stability(c) => c.solve.seed = seed,
            Self::Counterexample(c) => c.seed = seed,
            Self::Sweep(c) => c.seed = seed,
        }
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Self::AnalyzeCoefficient(_) => "analyze-coefficient",
            Self::Solve(_) => "solve",
            Self::Front(_) => "front",
            Self::Stability(_) => "stability",
            Self::Counterexample(_) => "counterexample",
            Self::Sweep(_) => "sweep",
        }
    }

    /// Validates every referenced module-level value before any
    /// computation starts.
    pub fn validate(&self) -> Result<(), Failure> {
        let invalid = |msg: String| Failure::validation(msg, Vec::new());
        match self {
            Self::AnalyzeCoefficient(c) => {
                c.coefficient.validate().map_err(|e| invalid(e.to_string()))?;
                c.conditions.validate()?;
                for v in c.expect.values() {
                    if !["satisfied", "violated", "inconclusive"].contains(&v.as_str()) {
                        return Err(invalid(format!("unknown expected verdict {v:?}")));
                    }
                }
            }
            Self::Solve(c) => c.validate_solve()?,
            Self::Front(c) => {
                c.solve.validate_solve()?;
                if !(c.epsilon > 0.0 && c.epsilon < 1.0) {
                    return Err(invalid(format!("epsilon must lie in (0,1), got {}", c.epsilon)));
                }
                if let Some(e) = c.eps_supp {
                    if !(e > 0.0) {
                        return Err(invalid("eps_supp must be positive".into()));
                    }
                }
                if let Some(v) = &c.expect {
                    if !["finite-speed-consistent", "immediate-positivity"].contains(&v.as_str()) {
                        return Err(invalid(format!("unknown expected front verdict {v:?}")));
                    }
                }
            }
            Self::Stability(c) => c.validate_stability()?,
            Self::Counterexample(c) => {
                Coefficient::counterexample(c.lambda, c.dim)
                    .map_err(|e| invalid(e.to_string()))?;
                if c.n_s < 2 || c.n_t < 2 {
                    return Err(invalid("residual grid needs n_s ≥ 2 and n_t ≥ 2".into()));
                }
                if !(c.residual_threshold > 0.0) {
                    return Err(invalid("residual threshold must be positive".into()));
                }
                c.conditions.validate()?;
            }
            Self::Sweep(c) => {
                c.base.validate_stability()?;
                for &g in &c.gamma {
                    if !g.is_finite() {
                        return Err(invalid("swept gamma values must be finite".into()));
                    }
                }
            }
        }
        Ok(())
    }
}

impl ConditionGrids {
    fn validate(&self) -> Result<(), Failure> {
        if !(self.s_min > 0.0 && self.s_max > self.s_min) {
            return Err(Failure::validation("condition grid needs 0 < s_min < s_max".into(), vec![]));
        }
        if self.per_decade == 0 || self.mu_grid.is_empty() {
            return Err(Failure::validation(
                "condition grid needs per_decade ≥ 1 and a nonempty mu grid".into(),
                vec![],
            ));
        }
        if !(self.tol > 0.0) {
            return Err(Failure::validation("quadrature tolerance must be positive".into(), vec![]));
        }
        Ok(())
    }
}

impl SolveConfig {
    fn validate_solve(&self) -> Result<(), Failure> {
        let invalid = |msg: String| Failure::validation(msg, Vec::new());
        self.coefficient.validate().map_err(|e| invalid(e.to_string()))?;
        Mesh::new(self.mesh.geometry, self.mesh.n_nodes).map_err(|e| invalid(e.to_string()))?;
        self.initial.sample(&self.mesh).map_err(|e| invalid(e.to_string()))?;
        if !(self.output_times.end > 0.0) || self.output_times.count == 0 {
            return Err(invalid("output times need end > 0 and count ≥ 1".into()));
        }
        if !(self.solver.cfl_safe > 0.0 && self.solver.cfl_safe < 1.0) {
            return Err(invalid(format!("cfl_safe must lie in (0,1), got {}", self.solver.cfl_safe)));
        }
        Ok(())
    }
}

impl StabilityConfig {
    fn validate_stability(&self) -> Result<(), Failure> {
        let invalid = |msg: String| Failure::validation(msg, Vec::new());
        self.solve.validate_solve()?;
        self.weight.validate().map_err(|e| invalid(e.to_string()))?;
        if !(self.functional.exponent >= 1.0) {
            return Err(invalid("functional exponent must be ≥ 1".into()));
        }
        if let Some(env) = &self.envelope {
            diffusionlab::stability::analytic_rate_basic(env.k_coeff, env.gamma, env.m, env.c0)
                .map_err(|e| invalid(e.to_string()))?;
            match &self.solve.coefficient {
                Coefficient::PowerLaw { k, rho } => {
                    if (k - env.k_coeff).abs() > 1e-12 || (rho - env.gamma).abs() > 1e-12 {
                        return Err(invalid(
                            "the basic-model envelope requires a power-law coefficient with k = k_coeff and rho = gamma".into(),
                        ));
                    }
                }
                _ => {
                    return Err(invalid(
                        "the basic-model envelope requires a power-law coefficient".into(),
                    ))
                }
            }
            if (env.m - self.functional.exponent).abs() > 1e-12 {
                return Err(invalid("envelope m must equal the functional exponent".into()));
            }
        }
        if let Some(odi) = &self.odi {
            odi.params.validate().map_err(|e| invalid(e.to_string()))?;
            if !(odi.slack >= 0.0) {
                return Err(invalid("ODI slack must be ≥ 0".into()));
            }
        }
        Ok(())
    }
}

/// Required top-level keys per experiment kind, used to produce a single
/// validation error listing everything missing.
fn required_keys(kind: &str) -> &'static [&'static str] {
    match kind {
        "analyze-coefficient" => &["coefficient"],
        "solve" => &["coefficient", "mesh", "initial", "output_times"],
        "front" => &["coefficient", "mesh", "initial", "output_times", "ball", "epsilon"],
        "stability" => &["coefficient", "mesh", "initial", "output_times", "functional"],
        "counterexample" => &["lambda", "dim"],
        "sweep" => &["base"],
        _ => &[],
    }
}

/// Parses and validates a config document, reporting all missing required
/// fields at once.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, Failure> {
    let value: Value = serde_json::from_str(text)
        .map_err(|e| Failure::validation(format!("config is not valid JSON: {e}"), vec![]))?;
    let obj = value
        .as_object()
        .ok_or_else(|| Failure::validation("config must be a JSON object".into(), vec!["kind".into()]))?;
    let kind = match obj.get("kind").and_then(Value::as_str) {
        Some(k) => k.to_string(),
        None => {
            return Err(Failure::validation(
                "config is missing required fields".into(),
                vec!["kind".into()],
            ))
        }
    };
    let missing: Vec<String> = required_keys(&kind)
        .iter()
        .filter(|k| !obj.contains_key(**k))
        .map(|k| k.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Failure::validation(
            format!("config for kind {kind:?} is missing required fields"),
            missing,
        ));
    }
    let config: ExperimentConfig = serde_json::from_value(value)
        .map_err(|e| Failure::validation(format!("config does not parse: {e}"), vec![]))?;
    config.validate()?;
    Ok(config)
}
