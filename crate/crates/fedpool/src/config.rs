//! Run configuration: JSON schema, validation with field-naming errors,
//! defaults, and the three bundled experiment presets.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::{Belief, ConfidenceWeights, HypothesisSet};
use crate::likelihood::{AgentModel, Correlation, Environment, IdentifiabilityReport};
use crate::pooling::PoolingRule;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid field `{field}`: {message}")]
    Validation { field: String, message: String },
    #[error("global identifiability fails for hypotheses {failing:?} (max KL below tolerance)")]
    Identifiability { failing: Vec<usize> },
}

impl ConfigError {
    fn invalid(field: &str, message: impl Into<String>) -> Self {
        ConfigError::Validation {
            field: field.to_string(),
            message: message.into(),
        }
    }
}

/// Which pooling rules a run exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum RuleSelection {
    Aa,
    Ga,
    #[default]
    Both,
}

impl RuleSelection {
    pub fn rules(self) -> Vec<PoolingRule> {
        match self {
            RuleSelection::Aa => vec![PoolingRule::Aa],
            RuleSelection::Ga => vec![PoolingRule::Ga],
            RuleSelection::Both => vec![PoolingRule::Aa, PoolingRule::Ga],
        }
    }
}

impl std::str::FromStr for RuleSelection {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "aa" => Ok(RuleSelection::Aa),
            "ga" => Ok(RuleSelection::Ga),
            "both" => Ok(RuleSelection::Both),
            other => Err(format!("unknown rule `{other}` (expected aa, ga or both)")),
        }
    }
}

/// Initial server belief.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(untagged)]
pub enum InitialBelief {
    #[default]
    #[serde(with = "uniform_tag")]
    Uniform,
    Probabilities(Vec<f64>),
}

mod uniform_tag {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str("uniform")
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<(), D::Error> {
        let tag = String::deserialize(d)?;
        if tag == "uniform" {
            Ok(())
        } else {
            Err(serde::de::Error::custom(format!(
                "expected \"uniform\", got \"{tag}\""
            )))
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisSpec {
    pub count: usize,
    pub true_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<Vec<String>>,
}

/// Complete description of one Monte Carlo run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub hypotheses: HypothesisSpec,
    pub agents: Vec<AgentModel>,
    #[serde(default = "Correlation::independent")]
    pub correlation: Correlation,
    pub weights: Vec<f64>,
    #[serde(default)]
    pub rule: RuleSelection,
    pub horizon: usize,
    pub realizations: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Defaults to `max(1, horizon / 100)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_every: Option<usize>,
    #[serde(default)]
    pub initial_belief: InitialBelief,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default = "default_estimator_samples")]
    pub estimator_samples: usize,
    #[serde(default)]
    pub write_trajectories: bool,
    /// Skips the identifiability gate when set.
    #[serde(default)]
    pub allow_unidentifiable: bool,
}

fn default_seed() -> u64 {
    1
}

fn default_estimator_samples() -> usize {
    1_000_000
}

/// The weight vector used by all three presets.
pub const PRESET_WEIGHTS: [f64; 10] = [0.13, 0.2, 0.09, 0.15, 0.08, 0.05, 0.1, 0.05, 0.1, 0.05];

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        Ok(cfg)
    }

    pub fn effective_record_every(&self) -> usize {
        self.record_every.unwrap_or_else(|| (self.horizon / 100).max(1))
    }

    /// Structural validation; does not touch the identifiability gate.
    pub fn validate(&self) -> Result<ValidatedConfig, ConfigError> {
        let hs = HypothesisSet::with_labels(
            self.hypotheses.count,
            self.hypotheses.true_index,
            self.hypotheses.labels.clone(),
        )
        .map_err(|e| ConfigError::invalid("hypotheses", e.to_string()))?;

        if self.agents.is_empty() {
            return Err(ConfigError::invalid("agents", "need at least one agent"));
        }
        if self.weights.len() != self.agents.len() {
            return Err(ConfigError::invalid(
                "weights",
                format!(
                    "{} weights for {} agents",
                    self.weights.len(),
                    self.agents.len()
                ),
            ));
        }
        let weights = ConfidenceWeights::new(self.weights.clone())
            .map_err(|e| ConfigError::invalid("weights", e.to_string()))?;
        let environment = Environment::new(self.agents.clone(), self.correlation.clone(), &hs)
            .map_err(|e| ConfigError::invalid("agents", e.to_string()))?;
        if self.horizon < 1 {
            return Err(ConfigError::invalid("horizon", "must be at least 1"));
        }
        if self.realizations < 1 {
            return Err(ConfigError::invalid("realizations", "must be at least 1"));
        }
        if let Some(0) = self.record_every {
            return Err(ConfigError::invalid("record_every", "must be at least 1"));
        }
        if self.estimator_samples < crate::asymptotics::MIN_MC_SAMPLES {
            return Err(ConfigError::invalid(
                "estimator_samples",
                format!("must be at least {}", crate::asymptotics::MIN_MC_SAMPLES),
            ));
        }
        let initial = match &self.initial_belief {
            InitialBelief::Uniform => Belief::uniform(hs.count()),
            InitialBelief::Probabilities(p) => {
                if p.len() != hs.count() {
                    return Err(ConfigError::invalid(
                        "initial_belief",
                        format!("{} entries for {} hypotheses", p.len(), hs.count()),
                    ));
                }
                Belief::from_probabilities(p)
                    .map_err(|e| ConfigError::invalid("initial_belief", e.to_string()))?
            }
        };
        if initial.log_value(hs.true_index()) == f64::NEG_INFINITY {
            return Err(ConfigError::invalid(
                "initial_belief",
                "zero initial mass on the true hypothesis",
            ));
        }
        Ok(ValidatedConfig {
            hypotheses: hs,
            environment,
            weights,
            initial,
            rules: self.rule.rules(),
            horizon: self.horizon,
            realizations: self.realizations,
            seed: self.seed,
            record_every: self.effective_record_every(),
            estimator_samples: self.estimator_samples,
            write_trajectories: self.write_trajectories,
            allow_unidentifiable: self.allow_unidentifiable,
            output_dir: self.output_dir.clone(),
        })
    }

    /// Validation plus the identifiability gate.
    pub fn validate_identifiable(&self) -> Result<ValidatedConfig, ConfigError> {
        let v = self.validate()?;
        v.check_identifiability()?;
        Ok(v)
    }
}

/// A structurally valid, fully resolved run configuration.
#[derive(Debug, Clone)]
pub struct ValidatedConfig {
    pub hypotheses: HypothesisSet,
    pub environment: Environment,
    pub weights: ConfidenceWeights,
    pub initial: Belief,
    pub rules: Vec<PoolingRule>,
    pub horizon: usize,
    pub realizations: usize,
    pub seed: u64,
    pub record_every: usize,
    pub estimator_samples: usize,
    pub write_trajectories: bool,
    pub allow_unidentifiable: bool,
    pub output_dir: Option<PathBuf>,
}

impl ValidatedConfig {
    pub fn identifiability(&self) -> IdentifiabilityReport {
        self.environment.check_global_identifiability(&self.hypotheses)
    }

    fn check_identifiability(&self) -> Result<(), ConfigError> {
        if self.allow_unidentifiable {
            return Ok(());
        }
        let report = self.identifiability();
        if report.pass {
            Ok(())
        } else {
            Err(ConfigError::Identifiability {
                failing: report
                    .per_hypothesis
                    .iter()
                    .filter(|h| !h.identifiable)
                    .map(|h| h.theta)
                    .collect(),
            })
        }
    }
}

/// Names of the bundled experiment presets.
pub const PRESET_NAMES: [&str; 3] = ["experiment-1", "experiment-2", "experiment-3"];

/// Builds one of the bundled presets: ten agents, binary hypotheses,
/// horizon 5000, 500 realizations, seed 1.
///
/// * `experiment-1`: independent unit-variance Gaussians, means 0 vs 1.
/// * `experiment-2`: independent exponentials, means 1 vs 0.5.
/// * `experiment-3`: the Gaussian setup with correlation matrix
///   `0.95 * ones + 0.05 * I`.
pub fn preset(name: &str) -> Option<RunConfig> {
    let k = 10;
    let gaussian = AgentModel::Gaussian {
        means: vec![0.0, 1.0],
        std: 1.0,
    };
    let (agents, correlation) = match name {
        "experiment-1" => (vec![gaussian; k], Correlation::independent()),
        "experiment-2" => (
            vec![AgentModel::Exponential { means: vec![1.0, 0.5] }; k],
            Correlation::independent(),
        ),
        "experiment-3" => {
            let mut m = vec![vec![0.95; k]; k];
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = 1.0;
            }
            (vec![gaussian; k], Correlation::Matrix(m))
        }
        _ => return None,
    };
    Some(RunConfig {
        hypotheses: HypothesisSpec {
            count: 2,
            true_index: 0,
            labels: None,
        },
        agents,
        correlation,
        weights: PRESET_WEIGHTS.to_vec(),
        rule: RuleSelection::Both,
        horizon: 5000,
        realizations: 500,
        seed: 1,
        record_every: None,
        initial_belief: InitialBelief::Uniform,
        output_dir: None,
        estimator_samples: 1_000_000,
        write_trajectories: false,
        allow_unidentifiable: false,
    })
}
