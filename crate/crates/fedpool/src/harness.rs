//! Monte Carlo orchestration: runs the configured number of independent
//! realizations, aggregates normalized statistics, empirical and
//! predicted error curves, normality tests and diagnostics, and writes
//! machine-readable outputs.
//!
//! Every realization draws from its own child stream of the master
//! seed, realizations run in parallel, and the aggregation is a
//! deterministic reduction ordered by realization index: results do not
//! depend on the worker-thread count.

use std::io::Write as _;
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::asymptotics::{
    aa_params, error_prob_union, ga_params, highprob_bound_diagnostic, normalize_statistic,
    AsymptoticsError, JensenGap, NormalityParams, StatisticForm,
};
use crate::belief::TrajectoryRecord;
use crate::config::{ConfigError, ValidatedConfig};
use crate::likelihood::IdentifiabilityReport;
use crate::pooling::{run_trajectories, PoolingError, PoolingRule};
use crate::rng::{child_seed, child_stream, StreamRole};
use crate::stats::{
    default_bin_count, histogram_density, ks_test_normal, shapiro_wilk, TestResult,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("realization {realization}: {source}")]
    Trajectory {
        realization: usize,
        source: PoolingError,
    },
    #[error(transparent)]
    Asymptotics(#[from] AsymptoticsError),
    #[error("cannot write outputs: {0}")]
    Io(#[from] std::io::Error),
    #[error("report does not contain rule {0}")]
    MissingRule(PoolingRule),
}

/// Aggregated quantities for one wrong hypothesis under one rule.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ThetaSummary {
    pub theta: usize,
    pub params: NormalityParams,
    /// Log-belief ratio at the horizon, one entry per realization.
    pub lambda_final: Vec<f64>,
    /// Normalized statistic at the horizon, one entry per realization.
    pub lambda_tilde: Vec<f64>,
    pub ks: TestResult,
    /// Absent when the realization count is outside the supported range.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shapiro: Option<TestResult>,
}

/// One point of the error-probability curve.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ErrorPoint {
    pub time: usize,
    /// Fraction of realizations whose MAP decision was wrong (a tie
    /// counts as an error).
    pub empirical: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Gaussian approximation (union bound over wrong hypotheses).
    pub predicted: f64,
}

/// High-probability bound diagnostic outcome.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BoundDiagnostic {
    pub epsilon: f64,
    pub i_0: usize,
    /// Fraction of realizations satisfying the exponential decay bound
    /// at every recorded time at or after `i_0`.
    pub fraction: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleReport {
    pub rule: PoolingRule,
    pub per_hypothesis: Vec<ThetaSummary>,
    pub error_curve: Vec<ErrorPoint>,
    pub diagnostic: BoundDiagnostic,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AggregateReport {
    pub seed: u64,
    pub realizations: usize,
    pub horizon: usize,
    pub record_every: usize,
    pub identifiability: IdentifiabilityReport,
    pub rules: Vec<RuleReport>,
    /// Rate comparison per wrong hypothesis; present when both rules ran.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub jensen: Vec<JensenGap>,
}

impl AggregateReport {
    pub fn rule(&self, rule: PoolingRule) -> Result<&RuleReport, HarnessError> {
        self.rules
            .iter()
            .find(|r| r.rule == rule)
            .ok_or(HarnessError::MissingRule(rule))
    }
}

/// Full output of a run: the report plus the raw trajectories,
/// indexed `[rule][realization]`.
#[derive(Debug)]
pub struct ExperimentOutput {
    pub report: AggregateReport,
    pub trajectories: Vec<Vec<TrajectoryRecord>>,
}

/// Runs the configured experiment. Both rules (when requested) consume
/// identical observation sequences per realization, so rule comparisons
/// are paired.
pub fn run_experiment(cfg: &ValidatedConfig) -> Result<ExperimentOutput, HarnessError> {
    let identifiability = cfg.identifiability();
    if !identifiability.pass && !cfg.allow_unidentifiable {
        return Err(HarnessError::Config(ConfigError::Identifiability {
            failing: identifiability
                .per_hypothesis
                .iter()
                .filter(|h| !h.identifiable)
                .map(|h| h.theta)
                .collect(),
        }));
    }

    // one trajectory bundle (all rules, shared observations) per realization
    let per_realization: Vec<Result<Vec<TrajectoryRecord>, HarnessError>> = (0..cfg.realizations)
        .into_par_iter()
        .map(|r| {
            let mut rng = child_stream(cfg.seed, r as u64, StreamRole::Observations);
            let mut records = run_trajectories(
                &cfg.environment,
                &cfg.hypotheses,
                &cfg.weights,
                &cfg.rules,
                &cfg.initial,
                cfg.horizon,
                cfg.record_every,
                &mut rng,
            )
            .map_err(|source| HarnessError::Trajectory {
                realization: r,
                source,
            })?;
            for rec in &mut records {
                rec.realization_index = r;
                rec.seed = child_seed(cfg.seed, r as u64, StreamRole::Observations);
            }
            Ok(records)
        })
        .collect();

    let mut by_rule: Vec<Vec<TrajectoryRecord>> =
        cfg.rules.iter().map(|_| Vec::with_capacity(cfg.realizations)).collect();
    for bundle in per_realization {
        let bundle = bundle?;
        for (rule_idx, rec) in bundle.into_iter().enumerate() {
            by_rule[rule_idx].push(rec);
        }
    }

    let params = estimate_params(cfg)?;
    let mut rules = Vec::with_capacity(cfg.rules.len());
    for (rule_idx, &rule) in cfg.rules.iter().enumerate() {
        rules.push(summarize_rule(
            cfg,
            rule,
            &by_rule[rule_idx],
            &params[rule_idx],
        )?);
    }

    let jensen = jensen_from_params(cfg, &params);

    Ok(ExperimentOutput {
        report: AggregateReport {
            seed: cfg.seed,
            realizations: cfg.realizations,
            horizon: cfg.horizon,
            record_every: cfg.record_every,
            identifiability,
            rules,
            jensen,
        },
        trajectories: by_rule,
    })
}

/// Normality parameters per rule (outer) and wrong hypothesis (inner).
fn estimate_params(cfg: &ValidatedConfig) -> Result<Vec<Vec<NormalityParams>>, HarnessError> {
    cfg.rules
        .iter()
        .map(|&rule| {
            cfg.hypotheses
                .wrong_indices()
                .map(|theta| match rule {
                    PoolingRule::Ga => {
                        Ok(ga_params(&cfg.environment, &cfg.hypotheses, &cfg.weights, theta)?)
                    }
                    PoolingRule::Aa => {
                        let mut rng =
                            child_stream(cfg.seed, theta as u64, StreamRole::ParamEstimation);
                        Ok(aa_params(
                            &cfg.environment,
                            &cfg.hypotheses,
                            &cfg.weights,
                            theta,
                            cfg.estimator_samples,
                            &mut rng,
                        )?)
                    }
                })
                .collect()
        })
        .collect()
}

fn jensen_from_params(cfg: &ValidatedConfig, params: &[Vec<NormalityParams>]) -> Vec<JensenGap> {
    let aa_idx = cfg.rules.iter().position(|&r| r == PoolingRule::Aa);
    let ga_idx = cfg.rules.iter().position(|&r| r == PoolingRule::Ga);
    let (Some(aa_idx), Some(ga_idx)) = (aa_idx, ga_idx) else {
        return Vec::new();
    };
    params[aa_idx]
        .iter()
        .zip(&params[ga_idx])
        .map(|(aa, ga)| {
            let se = aa.estimation.rho_std_error();
            JensenGap {
                rho_g: ga.rho,
                rho_a: aa.rho,
                std_error_rho_a: se,
                gap_nonnegative: ga.rho >= aa.rho - 4.0 * se,
            }
        })
        .collect()
}

fn summarize_rule(
    cfg: &ValidatedConfig,
    rule: PoolingRule,
    records: &[TrajectoryRecord],
    params: &[NormalityParams],
) -> Result<RuleReport, HarnessError> {
    let horizon = cfg.horizon;
    let mut per_hypothesis = Vec::with_capacity(params.len());
    for p in params {
        let theta = p.theta;
        let lambda_final: Vec<f64> = records
            .iter()
            .map(|rec| rec.final_lambda()[theta])
            .collect();
        let lambda_tilde: Vec<f64> = lambda_final
            .iter()
            .map(|&l| normalize_statistic(l, p, horizon, StatisticForm::LogBeliefRatio))
            .collect::<Result<_, _>>()?;
        let ks = ks_test_normal(&lambda_tilde).unwrap_or(TestResult {
            test: crate::stats::TestKind::Ks,
            statistic: f64::NAN,
            p_value: f64::NAN,
            n: lambda_tilde.len(),
        });
        let shapiro = shapiro_wilk(&lambda_tilde).ok();
        per_hypothesis.push(ThetaSummary {
            theta,
            params: *p,
            lambda_final,
            lambda_tilde,
            ks,
            shapiro,
        });
    }

    // empirical MAP error curve with Wilson intervals and the Gaussian
    // approximation alongside
    let times = &records[0].times;
    let mut error_curve = Vec::with_capacity(times.len());
    for (t_idx, &time) in times.iter().enumerate() {
        let errors = records
            .iter()
            .filter(|rec| {
                let lambda = &rec.lambda[t_idx];
                cfg.hypotheses.wrong_indices().any(|th| lambda[th] <= 0.0)
            })
            .count();
        let n = records.len();
        let (ci_low, ci_high) = wilson_interval(errors, n);
        let predicted = if time == 0 {
            1.0
        } else {
            error_prob_union(params, time)?
        };
        error_curve.push(ErrorPoint {
            time,
            empirical: errors as f64 / n as f64,
            ci_low,
            ci_high,
            predicted,
        });
    }

    // exponential decay bound diagnostic; rho from the first wrong
    // hypothesis (the binary experiments have exactly one)
    let rho = params[0].rho;
    let epsilon = 0.5 * rho;
    let i_0 = (horizon / 5).max(1);
    let fraction = highprob_bound_diagnostic(records, &cfg.hypotheses, rho, epsilon, i_0);

    Ok(RuleReport {
        rule,
        per_hypothesis,
        error_curve,
        diagnostic: BoundDiagnostic {
            epsilon,
            i_0,
            fraction,
        },
    })
}

/// 95% Wilson score interval for a binomial proportion.
fn wilson_interval(successes: usize, n: usize) -> (f64, f64) {
    let z = 1.959963984540054f64;
    let n = n as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Side-by-side AA/GA comparison at every recorded time.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RuleComparison {
    pub times: Vec<usize>,
    pub aa_empirical: Vec<f64>,
    pub aa_ci: Vec<(f64, f64)>,
    pub aa_predicted: Vec<f64>,
    pub ga_empirical: Vec<f64>,
    pub ga_ci: Vec<(f64, f64)>,
    pub ga_predicted: Vec<f64>,
    pub aa_params: Vec<NormalityParams>,
    pub ga_params: Vec<NormalityParams>,
    pub jensen: Vec<JensenGap>,
}

/// Builds the comparison summary; fails when a rule is missing.
pub fn compare_rules(report: &AggregateReport) -> Result<RuleComparison, HarnessError> {
    let aa = report.rule(PoolingRule::Aa)?;
    let ga = report.rule(PoolingRule::Ga)?;
    Ok(RuleComparison {
        times: aa.error_curve.iter().map(|e| e.time).collect(),
        aa_empirical: aa.error_curve.iter().map(|e| e.empirical).collect(),
        aa_ci: aa.error_curve.iter().map(|e| (e.ci_low, e.ci_high)).collect(),
        aa_predicted: aa.error_curve.iter().map(|e| e.predicted).collect(),
        ga_empirical: ga.error_curve.iter().map(|e| e.empirical).collect(),
        ga_ci: ga.error_curve.iter().map(|e| (e.ci_low, e.ci_high)).collect(),
        ga_predicted: ga.error_curve.iter().map(|e| e.predicted).collect(),
        aa_params: aa.per_hypothesis.iter().map(|h| h.params).collect(),
        ga_params: ga.per_hypothesis.iter().map(|h| h.params).collect(),
        jensen: report.jensen.clone(),
    })
}

/// Formats a float with 17 significant digits; `-inf` spelled literally.
fn fmt_float(x: f64) -> String {
    if x == f64::NEG_INFINITY {
        "-inf".to_string()
    } else if x == f64::INFINITY {
        "inf".to_string()
    } else {
        format!("{x:.16e}")
    }
}

/// Writes `report.json`, per-rule normalized-statistic and histogram
/// CSVs, and (when enabled) per-realization trajectory CSVs into `dir`.
pub fn write_outputs(
    output: &ExperimentOutput,
    cfg: &ValidatedConfig,
    dir: &Path,
) -> Result<(), HarnessError> {
    std::fs::create_dir_all(dir)?;
    let json = serde_json::to_string_pretty(&output.report)?;
    std::fs::write(dir.join("report.json"), json)?;

    for rule_report in &output.report.rules {
        let rule = rule_report.rule;
        let mut file =
            std::fs::File::create(dir.join(format!("lambda_tilde_{}.csv", rule.label())))?;
        writeln!(file, "realization,theta,lambda,lambda_tilde")?;
        for h in &rule_report.per_hypothesis {
            for (r, (&l, &lt)) in h.lambda_final.iter().zip(&h.lambda_tilde).enumerate() {
                writeln!(file, "{r},{},{},{}", h.theta, fmt_float(l), fmt_float(lt))?;
            }
        }

        let mut file =
            std::fs::File::create(dir.join(format!("histogram_{}.csv", rule.label())))?;
        writeln!(file, "theta,bin_left,bin_right,density")?;
        for h in &rule_report.per_hypothesis {
            let bins = default_bin_count(h.lambda_tilde.len());
            let (edges, densities) = histogram_density(&h.lambda_tilde, bins);
            for (pair, d) in edges.windows(2).zip(&densities) {
                writeln!(
                    file,
                    "{},{},{},{}",
                    h.theta,
                    fmt_float(pair[0]),
                    fmt_float(pair[1]),
                    fmt_float(*d)
                )?;
            }
        }
    }

    if cfg.write_trajectories {
        let traj_dir = dir.join("trajectories");
        std::fs::create_dir_all(&traj_dir)?;
        for (rule_idx, records) in output.trajectories.iter().enumerate() {
            let rule = cfg.rules[rule_idx];
            for rec in records {
                let mut file = std::fs::File::create(traj_dir.join(format!(
                    "{}_r{:05}.csv",
                    rule.label(),
                    rec.realization_index
                )))?;
                let h = cfg.hypotheses.count();
                let mut header = String::from("time");
                for theta in 0..h {
                    header.push_str(&format!(",log_belief_{theta}"));
                }
                for theta in 0..h {
                    header.push_str(&format!(",lambda_{theta}"));
                }
                writeln!(file, "{header}")?;
                for (t_idx, &time) in rec.times.iter().enumerate() {
                    let mut line = time.to_string();
                    for &v in rec.log_beliefs[t_idx].log_values() {
                        line.push(',');
                        line.push_str(&fmt_float(v));
                    }
                    for &v in &rec.lambda[t_idx] {
                        line.push(',');
                        line.push_str(&fmt_float(v));
                    }
                    writeln!(file, "{line}")?;
                }
            }
        }
    }
    Ok(())
}

impl From<serde_json::Error> for HarnessError {
    fn from(e: serde_json::Error) -> Self {
        HarnessError::Io(std::io::Error::other(e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{preset, RuleSelection};

    fn small_config() -> crate::config::ValidatedConfig {
        let mut cfg = preset("experiment-1").unwrap();
        cfg.horizon = 60;
        cfg.realizations = 8;
        cfg.record_every = Some(20);
        cfg.estimator_samples = 20_000;
        cfg.validate_identifiable().unwrap()
    }

    #[test]
    fn aggregate_equals_concatenated_single_runs() {
        let cfg = small_config();
        let whole = run_experiment(&cfg).unwrap();
        for r in 0..cfg.realizations {
            let mut rng = child_stream(cfg.seed, r as u64, StreamRole::Observations);
            let single = run_trajectories(
                &cfg.environment,
                &cfg.hypotheses,
                &cfg.weights,
                &cfg.rules,
                &cfg.initial,
                cfg.horizon,
                cfg.record_every,
                &mut rng,
            )
            .unwrap();
            for (rule_idx, rec) in single.iter().enumerate() {
                assert_eq!(whole.trajectories[rule_idx][r].lambda, rec.lambda);
            }
        }
    }

    #[test]
    fn degenerate_single_round_single_realization() {
        let mut cfg = preset("experiment-1").unwrap();
        cfg.horizon = 1;
        cfg.realizations = 1;
        cfg.record_every = Some(1);
        cfg.estimator_samples = 10_000;
        let out = run_experiment(&cfg.validate_identifiable().unwrap()).unwrap();
        assert_eq!(out.report.realizations, 1);
        for rule in &out.report.rules {
            assert_eq!(rule.error_curve.len(), 2); // t = 0 and t = 1
            assert_eq!(rule.per_hypothesis[0].lambda_final.len(), 1);
        }
    }

    #[test]
    fn unidentifiable_config_refuses_to_run() {
        let mut cfg = preset("experiment-1").unwrap();
        for agent in &mut cfg.agents {
            *agent = crate::likelihood::AgentModel::Gaussian {
                means: vec![0.0, 0.0],
                std: 1.0,
            };
        }
        cfg.horizon = 5;
        cfg.realizations = 2;
        cfg.estimator_samples = 10_000;
        let validated = cfg.validate().unwrap();
        assert!(matches!(
            run_experiment(&validated),
            Err(HarnessError::Config(ConfigError::Identifiability { .. }))
        ));
    }

    #[test]
    fn compare_rules_requires_both() {
        let mut cfg = preset("experiment-1").unwrap();
        cfg.horizon = 10;
        cfg.realizations = 2;
        cfg.record_every = Some(5);
        cfg.estimator_samples = 10_000;
        cfg.rule = RuleSelection::Ga;
        let out = run_experiment(&cfg.validate_identifiable().unwrap()).unwrap();
        assert!(matches!(
            compare_rules(&out.report),
            Err(HarnessError::MissingRule(PoolingRule::Aa))
        ));
    }

    #[test]
    fn single_agent_rules_have_identical_error_curves() {
        let mut cfg = preset("experiment-1").unwrap();
        cfg.agents.truncate(1);
        cfg.weights = vec![1.0];
        cfg.horizon = 40;
        cfg.realizations = 30;
        cfg.record_every = Some(10);
        cfg.estimator_samples = 10_000;
        let out = run_experiment(&cfg.validate_identifiable().unwrap()).unwrap();
        let cmp = compare_rules(&out.report).unwrap();
        assert_eq!(cmp.aa_empirical, cmp.ga_empirical);
    }

    #[test]
    fn outputs_are_written_and_report_parses_back() {
        let cfg = small_config();
        let out = run_experiment(&cfg).unwrap();
        let dir = tempfile::tempdir().unwrap();
        write_outputs(&out, &cfg, dir.path()).unwrap();
        let text = std::fs::read_to_string(dir.path().join("report.json")).unwrap();
        let parsed: AggregateReport = serde_json::from_str(&text).unwrap();
        assert_eq!(parsed.realizations, cfg.realizations);
        assert!(dir.path().join("lambda_tilde_aa.csv").exists());
        assert!(dir.path().join("histogram_ga.csv").exists());
    }
}
