//! Experiment configuration read from a single JSON document.

use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::em::EmConfig;
use crate::graph::{Topology, TopologyKind};
use crate::model::PriorHyperParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    MseVsBounds,
    TopologyIt,
    TopologyBcrb,
    PhaseTransition,
    HaIt,
    HaHcrb,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::MseVsBounds => "mse-vs-bounds",
            ExperimentKind::TopologyIt => "topology-it",
            ExperimentKind::TopologyBcrb => "topology-bcrb",
            ExperimentKind::PhaseTransition => "phase-transition",
            ExperimentKind::HaIt => "ha-it",
            ExperimentKind::HaHcrb => "ha-hcrb",
        }
    }
}

/// Common prior rate: a number or the string "ak-1" (b = a k - 1).
#[derive(Debug, Clone, PartialEq)]
pub enum RateSpec {
    Value(f64),
    AkMinusOne,
}

impl Serialize for RateSpec {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            RateSpec::Value(b) => s.serialize_f64(*b),
            RateSpec::AkMinusOne => s.serialize_str("ak-1"),
        }
    }
}

impl<'de> Deserialize<'de> for RateSpec {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        match Value::deserialize(d)? {
            Value::Number(n) => n
                .as_f64()
                .map(RateSpec::Value)
                .ok_or_else(|| serde::de::Error::custom("rate is not a finite number")),
            Value::String(s) if matches!(s.trim(), "ak-1" | "b=ak-1") => Ok(RateSpec::AkMinusOne),
            other => Err(serde::de::Error::custom(format!(
                "rate must be a number or \"ak-1\", got {other}"
            ))),
        }
    }
}

/// Uniform Gamma prior shared by all items.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PriorSpec {
    pub a: f64,
    pub b: RateSpec,
}

impl PriorSpec {
    pub fn rate(&self, k: usize) -> f64 {
        match self.b {
            RateSpec::Value(b) => b,
            RateSpec::AkMinusOne => self.a * k as f64 - 1.0,
        }
    }

    pub fn build(&self, k: usize) -> Result<PriorHyperParams, ConfigError> {
        PriorHyperParams::uniform(k, self.a, self.rate(k)).map_err(|e| ConfigError(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub k: usize,
    pub prior: PriorSpec,
    pub n_grid: Vec<u64>,
    pub topologies: Vec<Topology>,
    #[serde(default)]
    pub theta_grid: Option<Vec<f64>>,
    pub trials: usize,
    pub seed: u64,
    #[serde(default)]
    pub out_path: Option<PathBuf>,
    /// Normalized edge probabilities p k / ln k for the phase transition.
    #[serde(default)]
    pub p_grid: Option<Vec<f64>>,
    /// Item counts for the phase transition (defaults to `[k]`).
    #[serde(default)]
    pub k_list: Option<Vec<usize>>,
    /// Fraction α of each pair's games hosted by the lower-index item.
    #[serde(default = "default_home_fraction")]
    pub home_fraction: f64,
    #[serde(default)]
    pub em: EmConfig,
}

fn default_home_fraction() -> f64 {
    1.0
}

/// Invalid or unreadable configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "configuration error: {}", self.0)
    }
}

impl std::error::Error for ConfigError {}

fn fail<T>(msg: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError(msg.into()))
}

const FIG1_GRID: [u64; 5] = [100, 316, 1000, 3162, 10_000];

impl ExperimentConfig {
    /// Defaults mirroring the figure settings for each experiment.
    pub fn defaults(kind: ExperimentKind) -> Self {
        let complete = |k| vec![Topology::new(TopologyKind::Complete, k)];
        let base = |k: usize, a: f64| Self {
            experiment: kind,
            k,
            prior: PriorSpec {
                a,
                b: RateSpec::AkMinusOne,
            },
            n_grid: FIG1_GRID.to_vec(),
            topologies: complete(k),
            theta_grid: None,
            trials: 200,
            seed: 1,
            out_path: None,
            p_grid: None,
            k_list: None,
            home_fraction: 1.0,
            em: EmConfig::default(),
        };
        match kind {
            ExperimentKind::MseVsBounds => base(10, 5.0),
            ExperimentKind::TopologyIt | ExperimentKind::TopologyBcrb => Self {
                topologies: [
                    TopologyKind::Complete,
                    TopologyKind::Chain,
                    TopologyKind::RandomTree,
                    TopologyKind::Star,
                ]
                .into_iter()
                .map(|t| Topology::new(t, 10))
                .collect(),
                trials: 1,
                ..base(10, 5.0)
            },
            ExperimentKind::PhaseTransition => Self {
                n_grid: vec![5000],
                topologies: Vec::new(),
                trials: 20,
                p_grid: Some((1..=30).map(|i| f64::from(i) / 10.0).collect()),
                k_list: Some(vec![50]),
                prior: PriorSpec {
                    a: 5.0,
                    b: RateSpec::Value(25.0),
                },
                ..base(50, 5.0)
            },
            ExperimentKind::HaIt => Self {
                n_grid: vec![1000],
                theta_grid: Some(vec![1.0, 1.5, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0]),
                trials: 1,
                ..base(10, 2.0)
            },
            ExperimentKind::HaHcrb => Self {
                n_grid: vec![1000],
                theta_grid: Some(vec![1.0, 1.5, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0]),
                trials: 1,
                ..base(10, 5.0)
            },
        }
    }

    /// Parse a JSON document. Fields that are absent take the defaults of the
    /// document's experiment kind, or of `fallback` when it names none.
    pub fn from_json(text: &str, fallback: ExperimentKind) -> Result<Self, ConfigError> {
        let user: Value = serde_json::from_str(text).map_err(|e| ConfigError(e.to_string()))?;
        let Value::Object(user) = user else {
            return fail("the document must be a JSON object");
        };
        let kind = match user.get("experiment") {
            Some(v) => serde_json::from_value(v.clone()).map_err(|e| ConfigError(e.to_string()))?,
            None => fallback,
        };
        let mut merged = serde_json::to_value(Self::defaults(kind)).expect("defaults serialize");
        let obj = merged.as_object_mut().expect("config is an object");
        for (key, value) in user {
            obj.insert(key, value);
        }
        let cfg: Self = serde_json::from_value(merged).map_err(|e| ConfigError(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.k < 2 {
            return fail(format!(
                "k = {} but at least two items are required",
                self.k
            ));
        }
        if self.n_grid.is_empty() {
            return fail("n_grid is empty");
        }
        if self.n_grid.windows(2).any(|w| w[0] >= w[1]) {
            return fail("n_grid must be strictly ascending");
        }
        if self.trials == 0 {
            return fail("trials must be at least 1");
        }
        let b = self.prior.rate(self.k);
        if !(self.prior.a > 0.0 && self.prior.a.is_finite() && b > 0.0 && b.is_finite()) {
            return fail(format!(
                "prior needs a > 0 and b > 0, got a={}, b={b}",
                self.prior.a
            ));
        }
        if !(0.0..=1.0).contains(&self.home_fraction) {
            return fail(format!(
                "home_fraction {} is not in [0, 1]",
                self.home_fraction
            ));
        }
        self.em.validate().map_err(|e| ConfigError(e.to_string()))?;
        for t in &self.topologies {
            if t.k != self.k {
                return fail(format!(
                    "topology {} has k = {} but k = {}",
                    t.kind.name(),
                    t.k,
                    self.k
                ));
            }
            t.edges().map_err(|e| ConfigError(e.to_string()))?;
        }
        if let Some(grid) = &self.theta_grid {
            if grid.is_empty() || grid.iter().any(|t| !(*t > 0.0 && t.is_finite())) {
                return fail("theta_grid must be a nonempty list of positive numbers");
            }
        }
        if let Some(grid) = &self.p_grid {
            if grid.is_empty() || grid.iter().any(|p| !(*p >= 0.0 && p.is_finite())) {
                return fail("p_grid must be a nonempty list of nonnegative numbers");
            }
        }
        if let Some(ks) = &self.k_list {
            if ks.is_empty() || ks.iter().any(|&k| k < 2) {
                return fail("k_list must be a nonempty list of values >= 2");
            }
        }
        Ok(())
    }

    /// The prior needs a > 2 for the Cramér–Rao bounds.
    pub fn require_cramer_rao(&self) -> Result<(), ConfigError> {
        if self.prior.a > 2.0 {
            Ok(())
        } else {
            fail(format!(
                "Cramér–Rao bounds need a > 2, got a = {}",
                self.prior.a
            ))
        }
    }

    pub fn theta_grid(&self) -> Result<&[f64], ConfigError> {
        match &self.theta_grid {
            Some(g) => Ok(g),
            None => fail("theta_grid is required"),
        }
    }

    pub fn topologies_or_complete(&self) -> Vec<Topology> {
        if self.topologies.is_empty() {
            vec![Topology::new(TopologyKind::Complete, self.k)]
        } else {
            self.topologies.clone()
        }
    }
}
