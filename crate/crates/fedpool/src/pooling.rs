//! The social-learning dynamics: local Bayesian adapt step, arithmetic
//! (AA) and geometric (GA) server fusion, and trajectory generation.
//!
//! One round: every agent updates the broadcast prior with its own
//! observation, the server pools the intermediate beliefs with the
//! selected rule and broadcasts the result. Rounds are synchronous and
//! all arithmetic stays in log-space.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::{Belief, BeliefError, ConfidenceWeights, HypothesisSet, TrajectoryRecord};
use crate::likelihood::{Environment, ModelError, Observation};
use crate::numeric::log_sum_exp;

/// The server's fusion rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoolingRule {
    /// Weighted arithmetic averaging (linear opinion pooling).
    Aa,
    /// Weighted geometric averaging (logarithmic opinion pooling).
    Ga,
}

impl PoolingRule {
    pub fn label(self) -> &'static str {
        match self {
            PoolingRule::Aa => "aa",
            PoolingRule::Ga => "ga",
        }
    }
}

impl std::fmt::Display for PoolingRule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PoolingError {
    #[error("belief update failed at time {time} ({rule}): {source}")]
    AtTime {
        time: usize,
        rule: PoolingRule,
        source: BeliefError,
    },
    #[error(transparent)]
    Belief(#[from] BeliefError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("record_every must be at least 1")]
    ZeroRecordEvery,
    #[error("expected {expected} agent beliefs, got {got}")]
    AgentCountMismatch { expected: usize, got: usize },
}

/// Local Bayesian adapt step: multiply the broadcast prior by the
/// agent's likelihood and renormalize. Zero prior mass stays zero.
pub fn adapt(
    prior: &Belief,
    model: &crate::likelihood::AgentModel,
    x: Observation,
) -> Result<Belief, PoolingError> {
    let posterior: Result<Vec<f64>, ModelError> = prior
        .log_values()
        .iter()
        .enumerate()
        .map(|(theta, &log_mu)| {
            if log_mu == f64::NEG_INFINITY {
                Ok(f64::NEG_INFINITY)
            } else {
                Ok(model.log_likelihood(x, theta)? + log_mu)
            }
        })
        .collect();
    Ok(Belief::normalize(posterior?)?)
}

/// Arithmetic fusion: the pooled belief is the weight-convex combination
/// of the agent beliefs, computed hypothesis-wise by log-sum-exp with the
/// weights folded in as log offsets. The result is renormalized to keep
/// the mass invariant tight under rounding.
pub fn fuse_aa(psis: &[Belief], w: &ConfidenceWeights) -> Result<Belief, PoolingError> {
    check_counts(psis, w)?;
    let h = psis[0].len();
    let log_w = w.log_values();
    let mut pooled = Vec::with_capacity(h);
    let mut terms = Vec::with_capacity(psis.len());
    for theta in 0..h {
        terms.clear();
        for (k, psi) in psis.iter().enumerate() {
            terms.push(log_w[k] + psi.log_value(theta));
        }
        pooled.push(log_sum_exp(&terms));
    }
    Ok(Belief::normalize(pooled)?)
}

/// Geometric fusion: weighted geometric mean, renormalized. A single
/// agent with zero mass on a hypothesis zeroes it in the pooled belief
/// (veto); if every hypothesis is vetoed the normalization is undefined
/// and this fails with `AllZero`.
pub fn fuse_ga(psis: &[Belief], w: &ConfidenceWeights) -> Result<Belief, PoolingError> {
    check_counts(psis, w)?;
    let h = psis[0].len();
    let mut pooled = vec![0.0f64; h];
    for (k, psi) in psis.iter().enumerate() {
        let pi_k = w.values()[k];
        for (theta, acc) in pooled.iter_mut().enumerate() {
            let v = psi.log_value(theta);
            if v == f64::NEG_INFINITY {
                *acc = f64::NEG_INFINITY;
            } else if *acc != f64::NEG_INFINITY {
                *acc += pi_k * v;
            }
        }
    }
    Ok(Belief::normalize(pooled)?)
}

fn check_counts(psis: &[Belief], w: &ConfidenceWeights) -> Result<(), PoolingError> {
    if psis.len() != w.len() {
        return Err(PoolingError::AgentCountMismatch {
            expected: w.len(),
            got: psis.len(),
        });
    }
    Ok(())
}

/// Runs one realization of the system for each requested rule over a
/// shared observation sequence: one `sample_round` per time step drives
/// every rule, which makes AA-vs-GA comparisons paired.
///
/// Beliefs and log-belief ratios are recorded at times
/// `{0, record_every, 2*record_every, ...}` plus the horizon.
#[allow(clippy::too_many_arguments)]
pub fn run_trajectories<R: Rng + ?Sized>(
    env: &Environment,
    hs: &HypothesisSet,
    w: &ConfidenceWeights,
    rules: &[PoolingRule],
    initial: &Belief,
    horizon: usize,
    record_every: usize,
    rng: &mut R,
) -> Result<Vec<TrajectoryRecord>, PoolingError> {
    if record_every == 0 {
        return Err(PoolingError::ZeroRecordEvery);
    }
    let mut beliefs: Vec<Belief> = vec![initial.clone(); rules.len()];
    let mut records: Vec<TrajectoryRecord> = rules
        .iter()
        .map(|_| TrajectoryRecord {
            realization_index: 0,
            seed: 0,
            times: Vec::new(),
            log_beliefs: Vec::new(),
            lambda: Vec::new(),
        })
        .collect();

    let record_at = |time: usize,
                         beliefs: &[Belief],
                         records: &mut Vec<TrajectoryRecord>|
     -> Result<(), PoolingError> {
        for (r, (belief, rule)) in beliefs.iter().zip(rules).enumerate() {
            let lambda = belief.log_belief_ratio(hs).map_err(|e| PoolingError::AtTime {
                time,
                rule: *rule,
                source: e,
            })?;
            records[r].times.push(time);
            records[r].log_beliefs.push(belief.clone());
            records[r].lambda.push(lambda);
        }
        Ok(())
    };

    record_at(0, &beliefs, &mut records)?;
    let mut psis: Vec<Belief> = Vec::with_capacity(env.agent_count());
    for time in 1..=horizon {
        let round = env.sample_round(hs.true_index(), rng);
        for (rule_idx, rule) in rules.iter().enumerate() {
            psis.clear();
            for (k, x) in round.iter().enumerate() {
                psis.push(adapt(&beliefs[rule_idx], env.agent(k), *x)?);
            }
            let fused = match rule {
                PoolingRule::Aa => fuse_aa(&psis, w),
                PoolingRule::Ga => fuse_ga(&psis, w),
            };
            beliefs[rule_idx] = fused.map_err(|e| match e {
                PoolingError::Belief(source) => PoolingError::AtTime {
                    time,
                    rule: *rule,
                    source,
                },
                other => other,
            })?;
        }
        if time % record_every == 0 || time == horizon {
            record_at(time, &beliefs, &mut records)?;
        }
    }
    Ok(records)
}

/// Single-rule convenience wrapper around [`run_trajectories`].
#[allow(clippy::too_many_arguments)]
pub fn run_trajectory<R: Rng + ?Sized>(
    env: &Environment,
    hs: &HypothesisSet,
    w: &ConfidenceWeights,
    rule: PoolingRule,
    initial: &Belief,
    horizon: usize,
    record_every: usize,
    rng: &mut R,
) -> Result<TrajectoryRecord, PoolingError> {
    Ok(
        run_trajectories(env, hs, w, &[rule], initial, horizon, record_every, rng)?
            .pop()
            .expect("one record per rule"),
    )
}
