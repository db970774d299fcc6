//! Convergence-rate constants for all three bundled experiments: the
//! analytic geometric rate, the Monte Carlo arithmetic rate, and the
//! Jensen relation rho_G >= rho_A between them.

use fedpool::asymptotics::{aa_params, ga_params};
use fedpool::config::{preset, PRESET_NAMES};
use fedpool::rng::{child_stream, StreamRole};

fn main() {
    println!(
        "{:<14} {:>8} {:>10} {:>8} {:>10}  jensen gap",
        "preset", "rho_G", "sigma2_G", "rho_A", "sigma2_A"
    );
    for name in PRESET_NAMES {
        let cfg = preset(name).unwrap().validate_identifiable().unwrap();
        let ga = ga_params(&cfg.environment, &cfg.hypotheses, &cfg.weights, 1).unwrap();
        let mut rng = child_stream(cfg.seed, 1, StreamRole::ParamEstimation);
        let aa = aa_params(
            &cfg.environment,
            &cfg.hypotheses,
            &cfg.weights,
            1,
            500_000,
            &mut rng,
        )
        .unwrap();
        println!(
            "{name:<14} {:>8.4} {:>10.4} {:>8.4} {:>10.4}  {:+.4}",
            ga.rho,
            ga.sigma2,
            aa.rho,
            aa.sigma2,
            ga.rho - aa.rho
        );
    }
    println!("\nthe geometric rate never falls below the arithmetic rate;");
    println!("correlation (experiment-3) moves rho_A but leaves rho_G fixed.");
}
