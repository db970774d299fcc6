//! Hypothesis sets, beliefs in log-space, confidence weights and the
//! elementary belief algebra shared by the rest of the crate.
//!
//! Beliefs are probability mass functions over a finite hypothesis set,
//! stored as log-probabilities. Log-space is mandatory here: log-belief
//! ratios grow linearly in time, so linear-space probabilities underflow
//! long before the horizons we simulate.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numeric::log_sum_exp;

/// Tolerance for "probabilities sum to one" checks.
pub const MASS_TOL: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum BeliefError {
    /// Every hypothesis carries zero mass; normalization is undefined.
    /// Under geometric pooling this signals that every hypothesis was
    /// vetoed by some agent.
    #[error("all hypotheses have zero mass; normalization undefined")]
    AllZero,
    /// The true hypothesis has zero mass, so log-belief ratios are
    /// undefined. Geometric pooling can reach this state when an agent
    /// vetoes the truth.
    #[error("true hypothesis has zero mass; log-belief ratio undefined")]
    TruthAnnihilated,
    #[error("hypothesis count must be at least 2, got {0}")]
    TooFewHypotheses(usize),
    #[error("true hypothesis index {index} out of range for {count} hypotheses")]
    TrueIndexOutOfRange { index: usize, count: usize },
    #[error("expected {expected} labels, got {got}")]
    LabelCountMismatch { expected: usize, got: usize },
    #[error("confidence weights invalid: {0}")]
    InvalidWeights(String),
}

/// The finite set of candidate states of nature, together with the index
/// of the hypothesis that actually generates the data.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisSet {
    count: usize,
    true_index: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl HypothesisSet {
    pub fn new(count: usize, true_index: usize) -> Result<Self, BeliefError> {
        Self::with_labels(count, true_index, None)
    }

    pub fn with_labels(
        count: usize,
        true_index: usize,
        labels: Option<Vec<String>>,
    ) -> Result<Self, BeliefError> {
        if count < 2 {
            return Err(BeliefError::TooFewHypotheses(count));
        }
        if true_index >= count {
            return Err(BeliefError::TrueIndexOutOfRange {
                index: true_index,
                count,
            });
        }
        if let Some(ref l) = labels {
            if l.len() != count {
                return Err(BeliefError::LabelCountMismatch {
                    expected: count,
                    got: l.len(),
                });
            }
        }
        Ok(Self {
            count,
            true_index,
            labels,
        })
    }

    pub fn count(&self) -> usize {
        self.count
    }

    pub fn true_index(&self) -> usize {
        self.true_index
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Iterator over the wrong-hypothesis indices.
    pub fn wrong_indices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.count).filter(move |&t| t != self.true_index)
    }
}

/// A probability mass function over hypotheses, stored as log-probabilities.
///
/// Entries live in `[-inf, 0]`; zero-mass hypotheses are `-inf`. After
/// [`Belief::normalize`] the linear-space entries sum to one within
/// [`MASS_TOL`].
#[derive(Debug, Clone, PartialEq)]
pub struct Belief {
    log_values: Vec<f64>,
}

impl Belief {
    /// Normalizes a vector of unnormalized log-masses into a proper belief.
    ///
    /// Entries are shifted by the log-sum-exp of the vector, so relative
    /// differences of finite entries are preserved exactly and `-inf`
    /// entries stay `-inf`.
    pub fn normalize(log_values: Vec<f64>) -> Result<Self, BeliefError> {
        let mut total = log_sum_exp(&log_values);
        if total == f64::NEG_INFINITY {
            return Err(BeliefError::AllZero);
        }
        // already-normalized input stays bit-identical (idempotence)
        if total.abs() < MASS_TOL {
            total = 0.0;
        }
        let log_values = log_values
            .into_iter()
            .map(|v| {
                if v == f64::NEG_INFINITY {
                    f64::NEG_INFINITY
                } else {
                    v - total
                }
            })
            .collect();
        Ok(Self { log_values })
    }

    /// Uniform belief over `count` hypotheses.
    pub fn uniform(count: usize) -> Self {
        let v = -(count as f64).ln();
        Self {
            log_values: vec![v; count],
        }
    }

    /// Builds a belief from linear-space probabilities (normalizing them).
    pub fn from_probabilities(probs: &[f64]) -> Result<Self, BeliefError> {
        Self::normalize(probs.iter().map(|p| p.ln()).collect())
    }

    pub fn len(&self) -> usize {
        self.log_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.log_values.is_empty()
    }

    pub fn log_values(&self) -> &[f64] {
        &self.log_values
    }

    pub fn log_value(&self, theta: usize) -> f64 {
        self.log_values[theta]
    }

    /// Linear-space probabilities, for reports.
    pub fn probabilities(&self) -> Vec<f64> {
        self.log_values.iter().map(|v| v.exp()).collect()
    }

    /// MAP estimate: argmax of the belief, ties broken by lowest index.
    pub fn map_estimate(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.log_values.iter().enumerate().skip(1) {
            if v > self.log_values[best] {
                best = i;
            }
        }
        best
    }

    /// Log-belief ratios `lambda(theta) = log mu(true) - log mu(theta)`.
    ///
    /// The entry at the true index is exactly zero; zero-mass hypotheses
    /// get `+inf`. Fails with [`BeliefError::TruthAnnihilated`] if the
    /// true hypothesis itself has zero mass.
    pub fn log_belief_ratio(&self, hs: &HypothesisSet) -> Result<Vec<f64>, BeliefError> {
        let log_true = self.log_values[hs.true_index()];
        if log_true == f64::NEG_INFINITY {
            return Err(BeliefError::TruthAnnihilated);
        }
        Ok(self
            .log_values
            .iter()
            .enumerate()
            .map(|(theta, &v)| {
                if theta == hs.true_index() {
                    0.0
                } else if v == f64::NEG_INFINITY {
                    f64::INFINITY
                } else {
                    log_true - v
                }
            })
            .collect())
    }
}

/// Positive, unit-sum server weights over the agents.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ConfidenceWeights {
    pi: Vec<f64>,
}

impl ConfidenceWeights {
    pub fn new(pi: Vec<f64>) -> Result<Self, BeliefError> {
        if pi.is_empty() {
            return Err(BeliefError::InvalidWeights("empty weight vector".into()));
        }
        if let Some(w) = pi.iter().find(|&&w| !(w > 0.0) || !w.is_finite()) {
            return Err(BeliefError::InvalidWeights(format!(
                "weights must be finite and positive, got {w}"
            )));
        }
        let sum: f64 = pi.iter().sum();
        if (sum - 1.0).abs() > MASS_TOL {
            return Err(BeliefError::InvalidWeights(format!(
                "weights must sum to 1, got {sum}"
            )));
        }
        Ok(Self { pi })
    }

    /// Uniform weights `1/K` over `k` agents.
    pub fn uniform(k: usize) -> Self {
        Self {
            pi: vec![1.0 / k as f64; k],
        }
    }

    pub fn len(&self) -> usize {
        self.pi.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pi.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.pi
    }

    pub fn log_values(&self) -> Vec<f64> {
        self.pi.iter().map(|w| w.ln()).collect()
    }
}

/// Per-realization time series of beliefs and log-belief ratios, with
/// seed provenance for reproducibility.
#[derive(Debug, Clone)]
pub struct TrajectoryRecord {
    pub realization_index: usize,
    pub seed: u64,
    pub times: Vec<usize>,
    pub log_beliefs: Vec<Belief>,
    /// `lambda[t][theta]`, with the entry at the true index always zero.
    pub lambda: Vec<Vec<f64>>,
}

impl TrajectoryRecord {
    /// The belief recorded at the final time.
    pub fn final_belief(&self) -> &Belief {
        self.log_beliefs.last().expect("trajectory never empty")
    }

    pub fn final_lambda(&self) -> &[f64] {
        self.lambda.last().expect("trajectory never empty")
    }
}
