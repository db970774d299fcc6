//! Empirical MAP error rates against the Gaussian approximation
//! Phi(-sqrt(i) rho / sigma), on a narrowed-gap Gaussian problem where
//! errors stay frequent enough to measure at short horizons.
//!
//! The geometric prediction tracks the measurement closely. The
//! arithmetic prediction is a conservative envelope at these horizons:
//! the trajectory is still in its fast early phase, so its asymptotic
//! rate understates performance.

use fedpool::config::preset;
use fedpool::harness::{compare_rules, run_experiment};
use fedpool::likelihood::AgentModel;

fn main() {
    let mut raw = preset("experiment-1").unwrap();
    for agent in &mut raw.agents {
        *agent = AgentModel::Gaussian {
            means: vec![0.0, 0.25],
            std: 1.0,
        };
    }
    raw.horizon = 200;
    raw.realizations = 2000;
    raw.record_every = Some(25);
    raw.estimator_samples = 200_000;
    let cfg = raw.validate_identifiable().unwrap();
    let out = run_experiment(&cfg).unwrap();
    let cmp = compare_rules(&out.report).unwrap();

    println!(
        "{:>5} {:>12} {:>12} {:>12} {:>12}",
        "i", "aa empir", "aa approx", "ga empir", "ga approx"
    );
    for (idx, &time) in cmp.times.iter().enumerate() {
        if time == 0 {
            continue;
        }
        println!(
            "{time:>5} {:>12.4} {:>12.4} {:>12.4} {:>12.4}",
            cmp.aa_empirical[idx], cmp.aa_predicted[idx], cmp.ga_empirical[idx], cmp.ga_predicted[idx]
        );
    }
}
