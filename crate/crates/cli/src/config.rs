//! Run configuration: one JSON document, strictly typed.

use std::path::Path;

use pointer_core::classify::{
    AccessibilityBudget, ObserverModel, OrderDisorderInput, RegionSpec, ReliabilityOptions,
};
use pointer_core::{
    make_apparatus, ApparatusSpec, Complex64, CouplingEnsemble, InitsPolicy, QubitInit,
    WindowParams,
};
use serde::Deserialize;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: u32,
    #[serde(default)]
    pub apparatus: Option<ApparatusConfig>,
    #[serde(default)]
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub window: Option<WindowParams>,
    #[serde(default)]
    pub observer: Option<ObserverModel>,
    #[serde(default)]
    pub reliability: Option<ReliabilityOptions>,
    #[serde(default)]
    pub budget: Option<AccessibilityBudget>,
    #[serde(default)]
    pub region: Option<RegionSpec>,
    /// Pairs of `(N, T)` diagram points to compare.
    #[serde(default)]
    pub comparisons: Vec<[(u64, f64); 2]>,
    #[serde(default)]
    pub order_disorder: Option<OrderDisorderInput>,
    #[serde(default)]
    pub oracle: Option<OracleConfig>,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
    #[serde(default)]
    pub info: Option<InfoConfig>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ApparatusConfig {
    pub couplings: CouplingsConfig,
    /// Number of qubits; implied by explicit coupling lists.
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default = "default_inits")]
    pub inits: InitsConfig,
}

fn default_inits() -> InitsConfig {
    InitsConfig::Equatorial { phases: None }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CouplingsConfig {
    Ordered { g: f64 },
    Disordered { interval: (f64, f64), seed: u64 },
    Explicit { values: Vec<f64> },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "policy", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitsConfig {
    Equatorial {
        #[serde(default)]
        phases: Option<Vec<f64>>,
    },
    Random {
        seed: u64,
    },
    /// Explicit `(α, β)` amplitudes as `[re, im]` pairs.
    Fixed {
        states: Vec<[[f64; 2]; 2]>,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub t_max: f64,
    pub step: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    #[serde(default = "default_oracle_seed")]
    pub seed: u64,
    #[serde(default = "default_cases")]
    pub cases: usize,
    /// Largest apparatus drawn; the first case always uses exactly this size.
    #[serde(default = "default_max_n")]
    pub max_n: usize,
    #[serde(default = "default_time_max")]
    pub time_max: f64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
    #[serde(default)]
    pub variance: VarianceCheck,
}

fn default_oracle_seed() -> u64 {
    2024
}
fn default_cases() -> usize {
    50
}
fn default_max_n() -> usize {
    10
}
fn default_time_max() -> f64 {
    200.0
}
fn default_tolerance() -> f64 {
    1e-10
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            seed: default_oracle_seed(),
            cases: default_cases(),
            max_n: default_max_n(),
            time_max: default_time_max(),
            tolerance: default_tolerance(),
            variance: VarianceCheck::default(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VarianceCheck {
    pub enabled: bool,
    pub horizon: f64,
    pub steps: usize,
    pub rel_tol: f64,
    pub mean_bound: f64,
}

impl Default for VarianceCheck {
    fn default() -> Self {
        Self {
            enabled: true,
            horizon: 1e5,
            steps: 2_000_000,
            rel_tol: 0.05,
            mean_bound: 0.02,
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub n_values: Vec<usize>,
    pub ensembles: Vec<SweepEnsemble>,
    pub seeds: Vec<u64>,
    #[serde(default)]
    pub random_inits: bool,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SweepEnsemble {
    Ordered { g: f64 },
    Disordered { interval: (f64, f64) },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InfoConfig {
    /// Outcome probabilities `|c_γ|²`; amplitudes are taken real.
    pub probabilities: Vec<f64>,
    #[serde(default)]
    pub epsilon: Option<f64>,
}

fn validation(e: impl std::fmt::Display) -> CliError {
    CliError::Validation(e.to_string())
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig = serde_json::from_str(text).map_err(validation)?;
        if cfg.schema_version != SCHEMA_VERSION {
            return Err(CliError::Validation(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                cfg.schema_version
            )));
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Replaces every seed in the document with `seed`.
    pub fn override_seed(&mut self, seed: u64) {
        if let Some(app) = &mut self.apparatus {
            if let CouplingsConfig::Disordered { seed: s, .. } = &mut app.couplings {
                *s = seed;
            }
            if let InitsConfig::Random { seed: s } = &mut app.inits {
                *s = seed;
            }
        }
        if let Some(o) = &mut self.oracle {
            o.seed = seed;
        }
        if let Some(s) = &mut self.sweep {
            s.seeds = vec![seed];
        }
        if let Some(od) = &mut self.order_disorder {
            od.seeds = vec![seed];
        }
    }

    /// Checks every physical constraint that can be checked without running.
    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(app) = &self.apparatus {
            let spec = app.build()?;
            if let Some(w) = &self.window {
                w.resolve(&spec).map_err(validation)?;
            }
        }
        if let Some(g) = &self.grid {
            if !(g.t_max.is_finite() && g.t_max >= 0.0 && g.step.is_finite() && g.step > 0.0) {
                return Err(CliError::Validation(format!(
                    "grid needs t_max >= 0 and step > 0, got t_max = {}, step = {}",
                    g.t_max, g.step
                )));
            }
        }
        if let Some(obs) = &self.observer {
            obs.validate().map_err(validation)?;
            if let Some(w) = &self.window {
                if obs.window.0 < 0.0 || obs.window.1 > w.t_max {
                    return Err(CliError::Validation(format!(
                        "observer window {:?} is not inside [0, {}]",
                        obs.window, w.t_max
                    )));
                }
            }
        }
        if let Some(b) = &self.budget {
            b.validate().map_err(validation)?;
        }
        if let Some(r) = &self.region {
            r.validate().map_err(validation)?;
        }
        if let Some(s) = &self.sweep {
            if s.n_values.is_empty() || s.ensembles.is_empty() || s.seeds.is_empty() {
                return Err(CliError::Validation(
                    "sweep needs nonempty n_values, ensembles and seeds".into(),
                ));
            }
            if s.n_values.contains(&0) {
                return Err(CliError::Validation(
                    "sweep n_values must be positive".into(),
                ));
            }
            for e in &s.ensembles {
                e.ensemble(0).validate().map_err(validation)?;
            }
        }
        if let Some(od) = &self.order_disorder {
            let (lo, hi) = od.interval;
            CouplingEnsemble::Disordered {
                interval: od.interval,
                seed: 0,
            }
            .validate()
            .map_err(validation)?;
            if !(lo <= od.g && od.g <= hi) || od.seeds.is_empty() || od.n == 0 {
                return Err(CliError::Validation(
                    "order_disorder needs g inside the interval, n > 0 and at least one seed"
                        .into(),
                ));
            }
            if let Some(obs) = &od.observer {
                obs.validate().map_err(validation)?;
            }
        }
        if let Some(o) = &self.oracle {
            let v = &o.variance;
            if o.cases == 0
                || o.max_n == 0
                || !(o.time_max.is_finite() && o.time_max >= 0.0)
                || o.tolerance.is_nan()
                || o.tolerance <= 0.0
                || !(v.horizon > 0.0 && v.steps > 0 && v.rel_tol > 0.0 && v.mean_bound > 0.0)
            {
                return Err(CliError::Validation("oracle settings out of range".into()));
            }
        }
        if let Some(i) = &self.info {
            if let Some(eps) = i.epsilon {
                if !(eps.is_finite() && eps >= 0.0) {
                    return Err(CliError::Validation(format!(
                        "epsilon must be >= 0, got {eps}"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn require<'a, T>(field: &'a Option<T>, name: &str) -> Result<&'a T, CliError> {
        field.as_ref().ok_or_else(|| {
            CliError::Validation(format!("config is missing the \"{name}\" section"))
        })
    }
}

impl ApparatusConfig {
    pub fn build(&self) -> Result<ApparatusSpec, CliError> {
        let explicit_len = match &self.couplings {
            CouplingsConfig::Explicit { values } => Some(values.len()),
            _ => None,
        };
        let n = match (self.n, explicit_len) {
            (Some(n), Some(len)) if n != len => {
                return Err(CliError::Validation(format!(
                    "n = {n} but {len} explicit couplings were given"
                )))
            }
            (Some(n), _) => n,
            (None, Some(len)) => len,
            (None, None) => return Err(CliError::Validation("apparatus needs \"n\"".into())),
        };
        let inits = match &self.inits {
            InitsConfig::Equatorial { phases } => InitsPolicy::Equatorial {
                phases: phases.clone(),
            },
            InitsConfig::Random { seed } => InitsPolicy::Random { seed: *seed },
            InitsConfig::Fixed { states } => InitsPolicy::Fixed {
                inits: states
                    .iter()
                    .map(|[a, b]| {
                        QubitInit::new(Complex64::new(a[0], a[1]), Complex64::new(b[0], b[1]))
                    })
                    .collect::<pointer_core::Result<_>>()
                    .map_err(validation)?,
            },
        };
        match &self.couplings {
            CouplingsConfig::Ordered { g } => {
                make_apparatus(CouplingEnsemble::Ordered { g: *g }, n, &inits)
            }
            CouplingsConfig::Disordered { interval, seed } => make_apparatus(
                CouplingEnsemble::Disordered {
                    interval: *interval,
                    seed: *seed,
                },
                n,
                &inits,
            ),
            CouplingsConfig::Explicit { values } => {
                ApparatusSpec::new(values.clone(), inits.build(n).map_err(validation)?)
            }
        }
        .map_err(validation)
    }
}

impl SweepEnsemble {
    pub fn ensemble(&self, seed: u64) -> CouplingEnsemble {
        match *self {
            SweepEnsemble::Ordered { g } => CouplingEnsemble::Ordered { g },
            SweepEnsemble::Disordered { interval } => {
                CouplingEnsemble::Disordered { interval, seed }
            }
        }
    }
}
