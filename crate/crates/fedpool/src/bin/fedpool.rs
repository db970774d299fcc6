//! Batch front end: run simulations from JSON configs, emit the bundled
//! experiment presets, compute rate parameters, and test existing
//! normalized-statistic CSVs for normality.
//!
//! Exit codes: 0 success, 2 parse error, 3 validation error, 4 runtime
//! failure. Logs go to stderr; machine-readable outputs go to the
//! configured output directory.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use fedpool::config::{preset, ConfigError, RuleSelection, RunConfig};
use fedpool::harness::{run_experiment, write_outputs, HarnessError};
use fedpool::stats::{ks_test_normal, shapiro_wilk};

#[derive(Parser)]
#[command(name = "fedpool", version, about = "Federated AA/GA opinion-pooling simulator")]
struct Cli {
    /// Worker threads (default: available parallelism).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Default)]
struct Overrides {
    /// Output directory for reports and CSVs.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    realizations: Option<usize>,
    #[arg(long)]
    horizon: Option<usize>,
    /// aa, ga or both.
    #[arg(long)]
    rule: Option<RuleSelection>,
    #[arg(long)]
    record_every: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation described by a JSON config file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run (or emit) one of the bundled experiment presets:
    /// experiment-1, experiment-2, experiment-3.
    Preset {
        name: String,
        #[command(flatten)]
        overrides: Overrides,
        /// Write the preset config to this path instead of running it.
        #[arg(long)]
        emit_config: Option<PathBuf>,
    },
    /// Compute the rate/variance parameters of a config without
    /// simulating trajectories.
    Params {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        samples: Option<usize>,
    },
    /// Run KS and Shapiro-Wilk on an existing lambda_tilde CSV
    /// (columns realization,theta,lambda,lambda_tilde).
    Normality {
        input: PathBuf,
    },
    /// Validate a config file and its identifiability; writes nothing.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
        {
            eprintln!("error: cannot configure thread pool: {e}");
            return ExitCode::from(4);
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

enum CliError {
    Parse(String),
    Validation(String),
    Runtime(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Runtime(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Parse(m) | CliError::Validation(m) | CliError::Runtime(m) => f.write_str(m),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } | ConfigError::Parse(_) => CliError::Parse(e.to_string()),
            ConfigError::Validation { .. } | ConfigError::Identifiability { .. } => {
                CliError::Validation(e.to_string())
            }
        }
    }
}

impl From<HarnessError> for CliError {
    fn from(e: HarnessError) -> Self {
        match e {
            HarnessError::Config(c) => c.into(),
            other => CliError::Runtime(other.to_string()),
        }
    }
}

fn apply_overrides(cfg: &mut RunConfig, o: &Overrides) {
    if let Some(seed) = o.seed {
        cfg.seed = seed;
    }
    if let Some(r) = o.realizations {
        cfg.realizations = r;
    }
    if let Some(h) = o.horizon {
        cfg.horizon = h;
    }
    if let Some(rule) = o.rule {
        cfg.rule = rule;
    }
    if let Some(re) = o.record_every {
        cfg.record_every = Some(re);
    }
    if let Some(out) = &o.out {
        cfg.output_dir = Some(out.clone());
    }
}

fn simulate(mut cfg: RunConfig, overrides: &Overrides) -> Result<(), CliError> {
    apply_overrides(&mut cfg, overrides);
    let validated = cfg.validate_identifiable()?;
    let out_dir = validated
        .output_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("out"));
    eprintln!(
        "running {} realizations, horizon {}, rules {:?}, seed {}",
        validated.realizations,
        validated.horizon,
        validated.rules,
        validated.seed
    );
    let output = run_experiment(&validated)?;
    write_outputs(&output, &validated, &out_dir)?;
    for rule in &output.report.rules {
        for h in &rule.per_hypothesis {
            eprintln!(
                "{} theta={}: rho={:.6} sigma2={:.6} ks_p={:.4}{}",
                rule.rule,
                h.theta,
                h.params.rho,
                h.params.sigma2,
                h.ks.p_value,
                h.shapiro
                    .map(|s| format!(" sw_p={:.4}", s.p_value))
                    .unwrap_or_default()
            );
        }
    }
    eprintln!("outputs written to {}", out_dir.display());
    Ok(())
}

fn run(command: Command) -> Result<(), CliError> {
    match command {
        Command::Simulate { config, overrides } => {
            let cfg = RunConfig::from_file(&config)?;
            simulate(cfg, &overrides)
        }
        Command::Preset {
            name,
            overrides,
            emit_config,
        } => {
            let mut cfg = preset(&name)
                .ok_or_else(|| CliError::Validation(format!("unknown preset `{name}`")))?;
            if let Some(path) = emit_config {
                apply_overrides(&mut cfg, &overrides);
                let json = serde_json::to_string_pretty(&cfg)
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
                std::fs::write(&path, json).map_err(|e| CliError::Runtime(e.to_string()))?;
                eprintln!("preset {name} written to {}", path.display());
                Ok(())
            } else {
                simulate(cfg, &overrides)
            }
        }
        Command::Params { config, samples } => {
            let mut cfg = RunConfig::from_file(&config)?;
            if let Some(s) = samples {
                cfg.estimator_samples = s;
            }
            let validated = cfg.validate_identifiable()?;
            let mut all = Vec::new();
            for theta in validated.hypotheses.wrong_indices() {
                let ga = fedpool::asymptotics::ga_params(
                    &validated.environment,
                    &validated.hypotheses,
                    &validated.weights,
                    theta,
                )
                .map_err(|e| CliError::Runtime(e.to_string()))?;
                let mut rng = fedpool::rng::child_stream(
                    validated.seed,
                    theta as u64,
                    fedpool::rng::StreamRole::ParamEstimation,
                );
                let aa = fedpool::asymptotics::aa_params(
                    &validated.environment,
                    &validated.hypotheses,
                    &validated.weights,
                    theta,
                    validated.estimator_samples,
                    &mut rng,
                )
                .map_err(|e| CliError::Runtime(e.to_string()))?;
                all.push(ga);
                all.push(aa);
            }
            let json = serde_json::to_string_pretty(&all)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            println!("{json}");
            Ok(())
        }
        Command::Normality { input } => {
            let text = std::fs::read_to_string(&input)
                .map_err(|e| CliError::Parse(format!("cannot read {}: {e}", input.display())))?;
            let mut by_theta: std::collections::BTreeMap<usize, Vec<f64>> = Default::default();
            for (lineno, line) in text.lines().enumerate().skip(1) {
                let fields: Vec<&str> = line.split(',').collect();
                if fields.len() != 4 {
                    return Err(CliError::Parse(format!(
                        "line {}: expected 4 columns, got {}",
                        lineno + 1,
                        fields.len()
                    )));
                }
                let theta: usize = fields[1]
                    .parse()
                    .map_err(|e| CliError::Parse(format!("line {}: {e}", lineno + 1)))?;
                let value: f64 = fields[3]
                    .parse()
                    .map_err(|e| CliError::Parse(format!("line {}: {e}", lineno + 1)))?;
                by_theta.entry(theta).or_default().push(value);
            }
            let mut results = Vec::new();
            for (theta, samples) in &by_theta {
                let ks = ks_test_normal(samples).map_err(|e| CliError::Runtime(e.to_string()))?;
                let sw = shapiro_wilk(samples).ok();
                results.push(serde_json::json!({
                    "theta": theta,
                    "ks": ks,
                    "shapiro_wilk": sw,
                }));
            }
            let json = serde_json::to_string_pretty(&results)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            println!("{json}");
            Ok(())
        }
        Command::Validate { config } => {
            let cfg = RunConfig::from_file(&config)?;
            let validated = cfg.validate()?;
            let report = validated.identifiability();
            let json = serde_json::to_string_pretty(&report)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
            println!("{json}");
            if !report.pass && !validated.allow_unidentifiable {
                return Err(CliError::Validation(
                    "global identifiability fails".to_string(),
                ));
            }
            eprintln!("config ok");
            Ok(())
        }
    }
}
