//! Experiment configuration.
//!
//! A config file is either a JSON object or flat `key = value` lines
//! (`#` starts a comment). Each value is read as JSON when it parses as
//! JSON and as a bare string otherwise, so `u = [-1, 1]` and
//! `experiment = two_speed` both work.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    TwoSpeed,
    Bernoulli,
    Multipoint,
    NoCrossing,
    SlowDecorrelation,
    Tails,
    Correspondence,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::TwoSpeed => "two_speed",
            Self::Bernoulli => "bernoulli",
            Self::Multipoint => "multipoint",
            Self::NoCrossing => "no_crossing",
            Self::SlowDecorrelation => "slow_decorrelation",
            Self::Tails => "tails",
            Self::Correspondence => "correspondence",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    /// Slow-lane rate of the two-speed model.
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_rho_minus")]
    pub rho_minus: f64,
    #[serde(default = "default_rho_plus")]
    pub rho_plus: f64,
    /// Offset of the two sources in the multipoint model.
    #[serde(default = "default_beta")]
    pub beta: f64,
    /// Slope of the point-to-point endpoint in the tail check.
    #[serde(default = "default_eta")]
    pub eta: f64,
    #[serde(default = "default_t")]
    pub t: f64,
    /// Second, smaller scale for the checks comparing two values of `t`.
    #[serde(default)]
    pub t_ref: Option<f64>,
    /// Replica count.
    #[serde(default = "default_n", alias = "N", alias = "replicas")]
    pub n: usize,
    /// Endpoint offsets (multipoint, Bernoulli marginals) or the local
    /// offset `u` of the correspondence spot check.
    #[serde(default)]
    pub u: Vec<f64>,
    /// Evaluation grid of the reported CDFs.
    #[serde(default)]
    pub s: Vec<f64>,
    #[serde(default = "default_nu")]
    pub nu: f64,
    /// Acceptance bound on the KS distance (or CDF gap); experiment
    /// default when absent.
    #[serde(default)]
    pub tolerance: Option<f64>,
    /// Replicas used for the Bernoulli marginal laws.
    #[serde(default)]
    pub marginal_n: Option<usize>,
    /// Replicas re-traced with doubled start-set truncation.
    #[serde(default = "default_doubling_n")]
    pub doubling_n: usize,
    /// Window side and probes per replica of the correspondence check.
    #[serde(default = "default_size")]
    pub size: i64,
    #[serde(default = "default_probes")]
    pub probes: usize,
    /// Slope `s` of the local spot check.
    #[serde(default = "default_local_slope")]
    pub local_slope: f64,
    /// Replicas of the local spot check.
    #[serde(default)]
    pub local_n: Option<usize>,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default)]
    pub out_dir: Option<String>,
}

fn default_alpha() -> f64 {
    0.5
}
fn default_rho_minus() -> f64 {
    0.25
}
fn default_rho_plus() -> f64 {
    0.75
}
fn default_beta() -> f64 {
    1.0
}
fn default_eta() -> f64 {
    1.0
}
fn default_t() -> f64 {
    2000.0
}
fn default_n() -> usize {
    1000
}
fn default_nu() -> f64 {
    0.6
}
fn default_doubling_n() -> usize {
    4
}
fn default_size() -> i64 {
    30
}
fn default_probes() -> usize {
    50
}
fn default_local_slope() -> f64 {
    1.0
}

impl ExperimentConfig {
    /// Config of `kind` with every other field at its default.
    pub fn new(kind: ExperimentKind) -> Self {
        let mut m = Map::new();
        m.insert("experiment".into(), Value::String(kind.name().into()));
        serde_json::from_value(Value::Object(m)).expect("defaults deserialize")
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let value = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).context("config is not valid JSON")?
        } else {
            flat_to_json(text)?
        };
        let cfg: Self = serde_json::from_value(value).context("bad config")?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_text(&text)
    }

    pub fn validate(&self) -> Result<()> {
        use ExperimentKind::*;
        if !(self.t >= 50.0 && self.t.is_finite()) {
            bail!("t must be at least 50");
        }
        if let Some(r) = self.t_ref {
            if !(r >= 50.0 && r < self.t) {
                bail!("t_ref must lie in [50, t)");
            }
        }
        if self.n == 0 {
            bail!("need at least one replica");
        }
        if matches!(self.experiment, NoCrossing | SlowDecorrelation) && !(self.nu > 1.0 / 3.0 && self.nu < 1.0) {
            bail!("nu must lie in (1/3, 1)");
        }
        match self.experiment {
            TwoSpeed | SlowDecorrelation | Correspondence if !(self.alpha > 0.0 && self.alpha < 1.0) => {
                bail!("alpha must lie in (0, 1)")
            }
            Bernoulli if !(self.rho_minus > 0.0 && self.rho_minus < self.rho_plus && self.rho_plus < 1.0) => {
                bail!("need 0 < rho_minus < rho_plus < 1")
            }
            Multipoint | NoCrossing => {
                if !(self.beta > 0.0) {
                    bail!("beta must be positive");
                }
                if self.u.len() > 4 || self.u.windows(2).any(|w| !(w[1] > w[0])) {
                    bail!("u must be strictly increasing with at most 4 entries");
                }
            }
            Tails if !(self.eta > 0.0) => bail!("eta must be positive"),
            Correspondence if self.size < 2 => bail!("size must be at least 2"),
            _ => {}
        }
        if self.s.windows(2).any(|w| !(w[1] > w[0])) {
            bail!("s grid must be strictly increasing");
        }
        Ok(())
    }
}

fn flat_to_json(text: &str) -> Result<Value> {
    let mut map = Map::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, val)) = line.split_once('=').or_else(|| line.split_once(':')) else {
            bail!("line {}: expected key = value", k + 1);
        };
        let (key, val) = (key.trim().trim_matches('"'), val.trim().trim_end_matches(','));
        let v = serde_json::from_str(val).unwrap_or_else(|_| Value::String(val.to_string()));
        if map.insert(key.to_string(), v).is_some() {
            bail!("line {}: duplicate key {key}", k + 1);
        }
    }
    Ok(Value::Object(map))
}
