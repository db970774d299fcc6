//! Central-limit behavior of the log-belief ratio: runs many short
//! realizations of the exponential-data experiment, studentizes the
//! final log-belief ratios, prints normality tests and a text histogram
//! against the standard normal density.

use fedpool::config::preset;
use fedpool::harness::run_experiment;
use fedpool::stats::{histogram_density, ks_test_normal, shapiro_wilk};

fn main() {
    let mut raw = preset("experiment-2").unwrap();
    raw.horizon = 2000;
    raw.realizations = 300;
    raw.record_every = Some(2000);
    raw.estimator_samples = 200_000;
    let cfg = raw.validate_identifiable().unwrap();
    let out = run_experiment(&cfg).unwrap();

    for rule in &out.report.rules {
        let tilde = &rule.per_hypothesis[0].lambda_tilde;
        let ks = ks_test_normal(tilde).unwrap();
        let sw = shapiro_wilk(tilde).unwrap();
        println!(
            "{}: ks D={:.4} p={:.3} | shapiro-wilk W={:.4} p={:.3}",
            rule.rule, ks.statistic, ks.p_value, sw.statistic, sw.p_value
        );
        let (edges, density) = histogram_density(tilde, 13);
        for (pair, d) in edges.windows(2).zip(&density) {
            let mid = 0.5 * (pair[0] + pair[1]);
            let normal = (-0.5 * mid * mid).exp() / (2.0 * std::f64::consts::PI).sqrt();
            let bar = "#".repeat((d * 80.0).round() as usize);
            println!("  {mid:>6.2} {bar:<35} (density {d:.3}, normal {normal:.3})");
        }
    }
}
