//! Convergence-rate and normality constants of the two pooling rules,
//! normalized statistics, Gaussian error-probability approximations,
//! the Jensen-gap comparison and the high-probability bound diagnostic.
//!
//! For a wrong hypothesis, the geometric rate is the weight-averaged KL
//! divergence of the agents and the arithmetic rate is the mean of
//! `-log(sum_k pi_k r_k)` per round; both pairs `(rho, sigma^2)` drive
//! the normal approximation of the log-belief ratio at large times.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::belief::{ConfidenceWeights, HypothesisSet, TrajectoryRecord};
use crate::likelihood::{AgentModel, Correlation, Environment};
use crate::numeric::{log_sum_exp, MomentAccumulator};
use crate::pooling::PoolingRule;
use crate::stats::std_normal_cdf;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticsError {
    #[error("per-round variance is zero; normalized statistic undefined")]
    DegenerateVariance,
    #[error("rate parameters are defined for wrong hypotheses only, got the true index {0}")]
    TrueHypothesis(usize),
    #[error("monte carlo estimation needs at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },
}

/// Minimum Monte Carlo sample count for parameter estimation.
pub const MIN_MC_SAMPLES: usize = 10_000;

/// How a parameter pair was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum Estimation {
    Analytic,
    MonteCarlo {
        samples: usize,
        std_error_rho: f64,
        std_error_sigma2: f64,
    },
}

impl Estimation {
    /// Standard error of the rate estimate; zero for analytic values.
    pub fn rho_std_error(&self) -> f64 {
        match self {
            Estimation::Analytic => 0.0,
            Estimation::MonteCarlo { std_error_rho, .. } => *std_error_rho,
        }
    }
}

/// The per-round decay rate and variance of the log-belief ratio toward
/// one wrong hypothesis, under one pooling rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormalityParams {
    pub rule: PoolingRule,
    pub theta: usize,
    pub rho: f64,
    pub sigma2: f64,
    #[serde(flatten)]
    pub estimation: Estimation,
}

impl NormalityParams {
    pub fn sigma(&self) -> f64 {
        self.sigma2.sqrt()
    }
}

/// Analytic geometric-pooling parameters for a wrong hypothesis.
///
/// The rate is the weighted sum of per-agent KL divergences and is
/// independent of cross-agent correlation; the variance accounts for the
/// correlation matrix when one is present.
pub fn ga_params(
    env: &Environment,
    hs: &HypothesisSet,
    w: &ConfidenceWeights,
    theta: usize,
) -> Result<NormalityParams, AsymptoticsError> {
    if theta == hs.true_index() {
        return Err(AsymptoticsError::TrueHypothesis(theta));
    }
    let truth = hs.true_index();
    let pi = w.values();
    let rho: f64 = env
        .agents()
        .iter()
        .zip(pi)
        .map(|(a, &p)| p * a.kl_divergence(truth, theta))
        .sum();

    let sigma2 = match env.correlation() {
        Correlation::Independent(_) => env
            .agents()
            .iter()
            .zip(pi)
            .map(|(a, &p)| p * p * log_ratio_variance(a, truth, theta))
            .sum(),
        Correlation::Matrix(c) => {
            // log r_k is linear in the observation for gaussian agents:
            // slope (mean_theta - mean_true) / std^2, so the variance of
            // the weighted sum is a quadratic form in the covariance.
            let coeff: Vec<f64> = env
                .agents()
                .iter()
                .zip(pi)
                .map(|(a, &p)| match a {
                    AgentModel::Gaussian { means, std } => {
                        p * (means[theta] - means[truth]) / std
                    }
                    _ => unreachable!("matrix correlation implies gaussian agents"),
                })
                .collect();
            let mut s = 0.0;
            for (i, &ci) in coeff.iter().enumerate() {
                for (j, &cj) in coeff.iter().enumerate() {
                    s += ci * cj * c[i][j];
                }
            }
            s
        }
    };
    Ok(NormalityParams {
        rule: PoolingRule::Ga,
        theta,
        rho,
        sigma2,
        estimation: Estimation::Analytic,
    })
}

/// Variance of `log r(theta)` under the true hypothesis, per family.
fn log_ratio_variance(model: &AgentModel, truth: usize, theta: usize) -> f64 {
    match model {
        AgentModel::Gaussian { means, std } => {
            let d = (means[theta] - means[truth]) / std;
            d * d
        }
        AgentModel::Exponential { means } => {
            // log r = const + (rate_true - rate_theta) x, Var(x) = mean_true^2
            let d = (1.0 / means[truth] - 1.0 / means[theta]) * means[truth];
            d * d
        }
        AgentModel::Categorical { rows } => {
            let p = &rows[truth];
            let q = &rows[theta];
            let mean: f64 = p.iter().zip(q).map(|(&p, &q)| p * (q / p).ln()).sum();
            p.iter()
                .zip(q)
                .map(|(&p, &q)| {
                    let l = (q / p).ln();
                    p * (l - mean) * (l - mean)
                })
                .sum()
        }
    }
}

/// Monte Carlo arithmetic-pooling parameters for a wrong hypothesis:
/// mean and variance of `log(sum_k pi_k r_k)` per round, estimated from
/// `samples` simulated rounds with reported standard errors.
pub fn aa_params<R: Rng + ?Sized>(
    env: &Environment,
    hs: &HypothesisSet,
    w: &ConfidenceWeights,
    theta: usize,
    samples: usize,
    rng: &mut R,
) -> Result<NormalityParams, AsymptoticsError> {
    if theta == hs.true_index() {
        return Err(AsymptoticsError::TrueHypothesis(theta));
    }
    if samples < MIN_MC_SAMPLES {
        return Err(AsymptoticsError::TooFewSamples {
            min: MIN_MC_SAMPLES,
            got: samples,
        });
    }
    let log_w = w.log_values();
    let mut acc = MomentAccumulator::new();
    let mut terms = vec![0.0f64; env.agent_count()];
    for _ in 0..samples {
        let round = env.sample_round(hs.true_index(), rng);
        for (k, &x) in round.iter().enumerate() {
            let r = env
                .agent(k)
                .log_likelihood(x, theta)
                .and_then(|lt| env.agent(k).log_likelihood(x, hs.true_index()).map(|l0| lt - l0))
                .expect("sampled observation is in support");
            terms[k] = log_w[k] + r;
        }
        acc.push(log_sum_exp(&terms));
    }
    Ok(NormalityParams {
        rule: PoolingRule::Aa,
        theta,
        rho: -acc.mean(),
        sigma2: acc.variance(),
        estimation: Estimation::MonteCarlo {
            samples,
            std_error_rho: acc.std_error_mean(),
            std_error_sigma2: acc.std_error_variance(),
        },
    })
}

/// Which quantity feeds the normalized statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticForm {
    /// `(lambda_i - rho i) / (sigma sqrt(i))` from the log-belief ratio.
    LogBeliefRatio,
    /// `-(log mu_i(theta) + rho i) / (sigma sqrt(i))` from the raw
    /// log-belief, oriented to match the ratio form as the belief on the
    /// truth approaches one.
    LogBelief,
}

/// Studentizes a log-belief quantity at time `i` under the normal
/// approximation. `value` is the log-belief ratio for
/// [`StatisticForm::LogBeliefRatio`] and `log mu_i(theta)` for
/// [`StatisticForm::LogBelief`].
pub fn normalize_statistic(
    value: f64,
    p: &NormalityParams,
    i: usize,
    form: StatisticForm,
) -> Result<f64, AsymptoticsError> {
    if p.sigma2 <= 0.0 {
        return Err(AsymptoticsError::DegenerateVariance);
    }
    let scale = p.sigma() * (i as f64).sqrt();
    Ok(match form {
        StatisticForm::LogBeliefRatio => (value - p.rho * i as f64) / scale,
        StatisticForm::LogBelief => -(value + p.rho * i as f64) / scale,
    })
}

/// Gaussian approximation of the probability that the log-belief ratio
/// toward one wrong hypothesis is non-positive at time `i`:
/// `Phi(-sqrt(i) rho / sigma)`.
pub fn error_prob_approx(p: &NormalityParams, i: usize) -> Result<f64, AsymptoticsError> {
    if p.sigma2 <= 0.0 {
        return Err(AsymptoticsError::DegenerateVariance);
    }
    Ok(std_normal_cdf(-(i as f64).sqrt() * p.rho / p.sigma()))
}

/// Union-bound composition over all wrong hypotheses, clamped at 1.
/// Conservative; reported as an approximation.
pub fn error_prob_union(params: &[NormalityParams], i: usize) -> Result<f64, AsymptoticsError> {
    let mut total = 0.0;
    for p in params {
        total += error_prob_approx(p, i)?;
    }
    Ok(total.min(1.0))
}

/// Fraction of realizations whose beliefs satisfy
/// `mu_i(theta) <= exp(-i (rho - eps))` for every recorded time at or
/// after `i_0` and every wrong hypothesis.
pub fn highprob_bound_diagnostic(
    records: &[TrajectoryRecord],
    hs: &HypothesisSet,
    rho: f64,
    eps: f64,
    i_0: usize,
) -> f64 {
    if records.is_empty() {
        return 0.0;
    }
    let satisfying = records
        .iter()
        .filter(|rec| {
            rec.times
                .iter()
                .zip(&rec.log_beliefs)
                .filter(|(&t, _)| t >= i_0)
                .all(|(&t, belief)| {
                    let bound = -(t as f64) * (rho - eps);
                    hs.wrong_indices().all(|theta| belief.log_value(theta) <= bound)
                })
        })
        .count();
    satisfying as f64 / records.len() as f64
}

/// Side-by-side convergence rates of the two rules for one wrong
/// hypothesis, with the Jensen comparison `rho_G >= rho_A`.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct JensenGap {
    pub rho_g: f64,
    pub rho_a: f64,
    pub std_error_rho_a: f64,
    /// Whether `rho_G >= rho_A - 4 SE(rho_A)` held.
    pub gap_nonnegative: bool,
}

/// Computes both rates and checks the Jensen relation within four
/// standard errors of the arithmetic-rate estimate.
pub fn jensen_gap<R: Rng + ?Sized>(
    env: &Environment,
    hs: &HypothesisSet,
    w: &ConfidenceWeights,
    theta: usize,
    samples: usize,
    rng: &mut R,
) -> Result<JensenGap, AsymptoticsError> {
    let ga = ga_params(env, hs, w, theta)?;
    let aa = aa_params(env, hs, w, theta, samples, rng)?;
    let se = aa.estimation.rho_std_error();
    Ok(JensenGap {
        rho_g: ga.rho,
        rho_a: aa.rho,
        std_error_rho_a: se,
        gap_nonnegative: ga.rho >= aa.rho - 4.0 * se,
    })
}
