//! Per-agent likelihood families, joint sampling under the true
//! hypothesis (including cross-agent Gaussian correlation), analytic
//! KL divergences, and the global-identifiability check.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::HypothesisSet;

/// KL below this threshold counts as "cannot distinguish".
pub const IDENTIFIABILITY_TOL: f64 = 1e-12;

const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("gaussian std must be positive, got {0}")]
    NonPositiveStd(f64),
    #[error("exponential mean must be positive, got {0}")]
    NonPositiveMean(f64),
    #[error("categorical row {row} must sum to 1 with strictly positive entries")]
    InvalidCategoricalRow { row: usize },
    #[error("model has {got} per-hypothesis parameters, expected {expected}")]
    HypothesisCountMismatch { expected: usize, got: usize },
    #[error("categorical rows must share one alphabet size")]
    RaggedAlphabet,
    #[error("symbol {symbol} outside alphabet of size {alphabet}")]
    OutOfSupport { symbol: usize, alphabet: usize },
    #[error("observation type does not match the model family")]
    ObservationKindMismatch,
    #[error("correlation matrix must be {k}x{k} symmetric positive-definite with unit diagonal")]
    InvalidCorrelation { k: usize },
    #[error("gaussian copula correlation requires every agent to be gaussian")]
    CopulaNeedsGaussianAgents,
    #[error("environment must have at least one agent")]
    NoAgents,
}

/// One observation: a real for the continuous families, a symbol index
/// for the categorical family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Observation {
    Real(f64),
    Symbol(usize),
}

/// An agent's family of likelihood functions, one distribution per
/// hypothesis. Parameters are indexed by hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum AgentModel {
    /// Scalar Gaussian with a per-hypothesis mean and one shared std.
    Gaussian { means: Vec<f64>, std: f64 },
    /// Exponential parameterized by its per-hypothesis mean.
    Exponential { means: Vec<f64> },
    /// Finite alphabet with one strictly positive probability row per
    /// hypothesis (same support across hypotheses by construction).
    Categorical { rows: Vec<Vec<f64>> },
}

impl AgentModel {
    pub fn validate(&self, hypothesis_count: usize) -> Result<(), ModelError> {
        match self {
            AgentModel::Gaussian { means, std } => {
                if !(*std > 0.0) || !std.is_finite() {
                    return Err(ModelError::NonPositiveStd(*std));
                }
                check_len(means.len(), hypothesis_count)
            }
            AgentModel::Exponential { means } => {
                check_len(means.len(), hypothesis_count)?;
                for &m in means {
                    if !(m > 0.0) || !m.is_finite() {
                        return Err(ModelError::NonPositiveMean(m));
                    }
                }
                Ok(())
            }
            AgentModel::Categorical { rows } => {
                check_len(rows.len(), hypothesis_count)?;
                let alphabet = rows[0].len();
                for (i, row) in rows.iter().enumerate() {
                    if row.len() != alphabet {
                        return Err(ModelError::RaggedAlphabet);
                    }
                    let sum: f64 = row.iter().sum();
                    if (sum - 1.0).abs() > 1e-12 || row.iter().any(|&p| !(p > 0.0)) {
                        return Err(ModelError::InvalidCategoricalRow { row: i });
                    }
                }
                Ok(())
            }
        }
    }

    /// Exact log-density (continuous) or log-mass (categorical) of `x`
    /// under hypothesis `theta`.
    pub fn log_likelihood(&self, x: Observation, theta: usize) -> Result<f64, ModelError> {
        match (self, x) {
            (AgentModel::Gaussian { means, std }, Observation::Real(x)) => {
                let z = (x - means[theta]) / std;
                Ok(-0.5 * z * z - std.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln())
            }
            (AgentModel::Exponential { means }, Observation::Real(x)) => {
                let rate = 1.0 / means[theta];
                Ok(rate.ln() - rate * x)
            }
            (AgentModel::Categorical { rows }, Observation::Symbol(s)) => {
                let row = &rows[theta];
                if s >= row.len() {
                    return Err(ModelError::OutOfSupport {
                        symbol: s,
                        alphabet: row.len(),
                    });
                }
                Ok(row[s].ln())
            }
            _ => Err(ModelError::ObservationKindMismatch),
        }
    }

    /// Log-likelihood ratios `log r(theta) = log L(x|theta) - log L(x|true)`
    /// for every hypothesis; the entry at the true index is exactly zero.
    pub fn log_likelihood_ratios(
        &self,
        x: Observation,
        hs: &HypothesisSet,
    ) -> Result<Vec<f64>, ModelError> {
        let log_true = self.log_likelihood(x, hs.true_index())?;
        (0..hs.count())
            .map(|theta| {
                if theta == hs.true_index() {
                    Ok(0.0)
                } else {
                    Ok(self.log_likelihood(x, theta)? - log_true)
                }
            })
            .collect()
    }

    /// Analytic KL divergence `D(L(.|from) || L(.|to))`.
    pub fn kl_divergence(&self, theta_from: usize, theta_to: usize) -> f64 {
        match self {
            AgentModel::Gaussian { means, std } => {
                let d = means[theta_from] - means[theta_to];
                d * d / (2.0 * std * std)
            }
            AgentModel::Exponential { means } => {
                let a = 1.0 / means[theta_from];
                let b = 1.0 / means[theta_to];
                (a / b).ln() + b / a - 1.0
            }
            AgentModel::Categorical { rows } => rows[theta_from]
                .iter()
                .zip(&rows[theta_to])
                .map(|(&p, &q)| p * (p / q).ln())
                .sum(),
        }
    }

    /// Samples one observation under hypothesis `theta`.
    pub fn sample<R: Rng + ?Sized>(&self, theta: usize, rng: &mut R) -> Observation {
        match self {
            AgentModel::Gaussian { means, std } => {
                let z: f64 = StandardNormal.sample(rng);
                Observation::Real(means[theta] + std * z)
            }
            AgentModel::Exponential { means } => {
                let u: f64 = rng.random::<f64>();
                // inverse CDF; 1 - u keeps u = 0 safe
                Observation::Real(-means[theta] * (1.0 - u).ln())
            }
            AgentModel::Categorical { rows } => {
                let u: f64 = rng.random::<f64>();
                let row = &rows[theta];
                let mut acc = 0.0;
                for (s, &p) in row.iter().enumerate() {
                    acc += p;
                    if u < acc {
                        return Observation::Symbol(s);
                    }
                }
                Observation::Symbol(row.len() - 1)
            }
        }
    }
}

fn check_len(got: usize, expected: usize) -> Result<(), ModelError> {
    if got != expected {
        Err(ModelError::HypothesisCountMismatch { expected, got })
    } else {
        Ok(())
    }
}

/// Cross-agent dependence structure of the joint data-generating process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Correlation {
    /// Agents draw independently from their marginals.
    Independent(IndependentTag),
    /// Joint multivariate normal with the per-agent means/stds and the
    /// given correlation matrix; only valid for all-Gaussian agents.
    Matrix(Vec<Vec<f64>>),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndependentTag {
    Independent,
}

impl Correlation {
    pub fn independent() -> Self {
        Correlation::Independent(IndependentTag::Independent)
    }
}

/// The joint sampler across `K` agents under the true hypothesis.
#[derive(Debug, Clone)]
pub struct Environment {
    agents: Vec<AgentModel>,
    correlation: Correlation,
    /// Lower Cholesky factor of the correlation matrix, when present.
    chol: Option<Vec<Vec<f64>>>,
}

impl Environment {
    pub fn new(
        agents: Vec<AgentModel>,
        correlation: Correlation,
        hs: &HypothesisSet,
    ) -> Result<Self, ModelError> {
        if agents.is_empty() {
            return Err(ModelError::NoAgents);
        }
        for agent in &agents {
            agent.validate(hs.count())?;
        }
        let chol = match &correlation {
            Correlation::Independent(_) => None,
            Correlation::Matrix(m) => {
                if !agents
                    .iter()
                    .all(|a| matches!(a, AgentModel::Gaussian { .. }))
                {
                    return Err(ModelError::CopulaNeedsGaussianAgents);
                }
                Some(validate_and_factor(m, agents.len())?)
            }
        };
        Ok(Self {
            agents,
            correlation,
            chol,
        })
    }

    pub fn independent(agents: Vec<AgentModel>, hs: &HypothesisSet) -> Result<Self, ModelError> {
        Self::new(agents, Correlation::independent(), hs)
    }

    pub fn agent_count(&self) -> usize {
        self.agents.len()
    }

    pub fn agents(&self) -> &[AgentModel] {
        &self.agents
    }

    pub fn agent(&self, k: usize) -> &AgentModel {
        &self.agents[k]
    }

    pub fn correlation(&self) -> &Correlation {
        &self.correlation
    }

    /// Draws one round of observations, jointly across agents, under
    /// hypothesis `theta`.
    pub fn sample_round<R: Rng + ?Sized>(&self, theta: usize, rng: &mut R) -> Vec<Observation> {
        match &self.chol {
            None => self.agents.iter().map(|a| a.sample(theta, rng)).collect(),
            Some(l) => {
                let k = self.agents.len();
                let z: Vec<f64> = (0..k).map(|_| StandardNormal.sample(rng)).collect();
                (0..k)
                    .map(|i| {
                        let corr: f64 = l[i].iter().zip(&z).map(|(a, b)| a * b).sum();
                        match &self.agents[i] {
                            AgentModel::Gaussian { means, std } => {
                                Observation::Real(means[theta] + std * corr)
                            }
                            _ => unreachable!("copula validated against gaussian agents"),
                        }
                    })
                    .collect()
            }
        }
    }

    /// Checks global identifiability: every wrong hypothesis must be
    /// distinguishable from the truth by at least one agent.
    pub fn check_global_identifiability(&self, hs: &HypothesisSet) -> IdentifiabilityReport {
        let per_hypothesis = hs
            .wrong_indices()
            .map(|theta| {
                let (best_agent, max_kl) = self
                    .agents
                    .iter()
                    .enumerate()
                    .map(|(k, a)| (k, a.kl_divergence(hs.true_index(), theta)))
                    .fold((0, f64::NEG_INFINITY), |acc, (k, kl)| {
                        if kl > acc.1 {
                            (k, kl)
                        } else {
                            acc
                        }
                    });
                HypothesisIdentifiability {
                    theta,
                    max_kl,
                    best_agent,
                    identifiable: max_kl > IDENTIFIABILITY_TOL,
                }
            })
            .collect::<Vec<_>>();
        let pass = per_hypothesis.iter().all(|h| h.identifiable);
        IdentifiabilityReport {
            per_hypothesis,
            pass,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HypothesisIdentifiability {
    pub theta: usize,
    pub max_kl: f64,
    pub best_agent: usize,
    pub identifiable: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IdentifiabilityReport {
    pub per_hypothesis: Vec<HypothesisIdentifiability>,
    pub pass: bool,
}

/// Validates symmetry, unit diagonal and positive-definiteness, and
/// returns the lower Cholesky factor.
fn validate_and_factor(m: &[Vec<f64>], k: usize) -> Result<Vec<Vec<f64>>, ModelError> {
    let invalid = || ModelError::InvalidCorrelation { k };
    if m.len() != k || m.iter().any(|row| row.len() != k) {
        return Err(invalid());
    }
    for i in 0..k {
        if (m[i][i] - 1.0).abs() > SYMMETRY_TOL {
            return Err(invalid());
        }
        for j in 0..i {
            if (m[i][j] - m[j][i]).abs() > SYMMETRY_TOL {
                return Err(invalid());
            }
        }
    }
    let mut l = vec![vec![0.0; k]; k];
    for i in 0..k {
        for j in 0..=i {
            let s: f64 = (0..j).map(|p| l[i][p] * l[j][p]).sum();
            if i == j {
                let d = m[i][i] - s;
                if d <= 0.0 {
                    return Err(invalid());
                }
                l[i][j] = d.sqrt();
            } else {
                l[i][j] = (m[i][j] - s) / l[j][j];
            }
        }
    }
    Ok(l)
}
