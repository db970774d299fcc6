//! With uniform confidence weights, independent data and a uniform
//! initial belief, geometric pooling reproduces the centralized Bayes
//! posterior up to a 1/K tempering of the log-belief ratio. This
//! example replays one observation sequence through both systems and
//! prints the two ratio trajectories side by side.

use fedpool::belief::{Belief, ConfidenceWeights, HypothesisSet};
use fedpool::likelihood::{AgentModel, Environment};
use fedpool::pooling::{run_trajectory, PoolingRule};
use fedpool::rng::{child_stream, StreamRole};

fn main() {
    let k = 4;
    let hs = HypothesisSet::new(3, 0).unwrap();
    let env = Environment::independent(
        vec![
            AgentModel::Gaussian {
                means: vec![0.0, 0.6, -0.6],
                std: 1.0,
            };
            k
        ],
        &hs,
    )
    .unwrap();
    let w = ConfidenceWeights::uniform(k);

    let mut rng = child_stream(2024, 0, StreamRole::Observations);
    let mut replay = rng.clone();
    let rec = run_trajectory(
        &env,
        &hs,
        &w,
        PoolingRule::Ga,
        &Belief::uniform(3),
        20,
        1,
        &mut rng,
    )
    .unwrap();

    // centralized bayes: accumulate every agent's log-likelihood
    let mut cum = vec![0.0f64; 3];
    println!(
        "{:>4} {:>12} {:>12} {:>12}",
        "i", "K*lambda_GA", "lambda_Bayes", "difference"
    );
    for step in 1..=20usize {
        let round = env.sample_round(0, &mut replay);
        for (agent, &x) in round.iter().enumerate() {
            for (theta, acc) in cum.iter_mut().enumerate() {
                *acc += env.agent(agent).log_likelihood(x, theta).unwrap();
            }
        }
        let bayes = cum[0] - cum[1];
        let ga = rec.lambda[step][1] * k as f64;
        println!("{step:>4} {ga:>12.6} {bayes:>12.6} {:>12.2e}", ga - bayes);
    }
}
