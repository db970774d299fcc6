//! Runs a scaled-down version of the bundled Gaussian experiment and
//! prints the aggregate report: rates, normality tests, the error
//! curve, and where the outputs land on disk.
//!
//! Pass a preset name (experiment-1, experiment-2, experiment-3) as the
//! first argument; defaults to experiment-1.

use fedpool::config::preset;
use fedpool::harness::{run_experiment, write_outputs};

fn main() {
    let name = std::env::args()
        .nth(1)
        .unwrap_or_else(|| "experiment-1".into());
    let mut raw = preset(&name).unwrap_or_else(|| {
        eprintln!("unknown preset {name}");
        std::process::exit(2);
    });
    // desk-scale overrides so the example finishes in seconds
    raw.horizon = 1000;
    raw.realizations = 200;
    raw.estimator_samples = 100_000;

    let cfg = raw.validate_identifiable().unwrap();
    let out = run_experiment(&cfg).unwrap();

    println!(
        "{name}: {} realizations, horizon {}",
        out.report.realizations, out.report.horizon
    );
    for rule in &out.report.rules {
        let h = &rule.per_hypothesis[0];
        println!(
            "  {}: rho={:.4} sigma2={:.4} ks_p={:.3} sw_p={:.3}",
            rule.rule,
            h.params.rho,
            h.params.sigma2,
            h.ks.p_value,
            h.shapiro.as_ref().map_or(f64::NAN, |t| t.p_value),
        );
        let last_nonzero = rule
            .error_curve
            .iter()
            .rev()
            .find(|p| p.empirical > 0.0);
        if let Some(p) = last_nonzero {
            println!(
                "     last nonzero error at i={}: empirical {:.4}, predicted {:.2e}",
                p.time, p.empirical, p.predicted
            );
        }
    }
    for gap in &out.report.jensen {
        println!(
            "  rate gap: rho_G {:.4} vs rho_A {:.4} (se {:.1e})",
            gap.rho_g, gap.rho_a, gap.std_error_rho_a
        );
    }

    let dir = std::env::temp_dir().join("fedpool_preset_example");
    write_outputs(&out, &cfg, &dir).unwrap();
    println!("outputs written to {}", dir.display());
}
