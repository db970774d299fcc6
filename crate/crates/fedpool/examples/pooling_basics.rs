//! One round of the system by hand: local Bayesian adapt steps at three
//! agents, then arithmetic and geometric fusion of their opinions,
//! including the geometric veto on a zeroed hypothesis.

use fedpool::belief::{Belief, ConfidenceWeights};
use fedpool::likelihood::{AgentModel, Observation};
use fedpool::pooling::{adapt, fuse_aa, fuse_ga};

fn show(label: &str, b: &Belief) {
    let p = b.probabilities();
    println!(
        "{label:<14} [{}]",
        p.iter()
            .map(|v| format!("{v:.4}"))
            .collect::<Vec<_>>()
            .join(", ")
    );
}

fn main() {
    let prior = Belief::uniform(3);
    let w = ConfidenceWeights::new(vec![0.5, 0.3, 0.2]).unwrap();
    let models = [
        AgentModel::Gaussian {
            means: vec![0.0, 1.0, 2.0],
            std: 1.0,
        },
        AgentModel::Gaussian {
            means: vec![0.0, 0.5, 1.0],
            std: 0.5,
        },
        // this agent cannot tell the first two hypotheses apart
        AgentModel::Gaussian {
            means: vec![0.0, 0.0, 3.0],
            std: 1.0,
        },
    ];
    let observations = [0.3, 0.1, -0.4];

    show("prior", &prior);
    let psis: Vec<Belief> = models
        .iter()
        .zip(observations)
        .map(|(m, x)| adapt(&prior, m, Observation::Real(x)).unwrap())
        .collect();
    for (k, psi) in psis.iter().enumerate() {
        show(&format!("agent {k}"), psi);
    }
    show("arithmetic", &fuse_aa(&psis, &w).unwrap());
    show("geometric", &fuse_ga(&psis, &w).unwrap());

    // one agent rules out hypothesis 0 entirely; geometric fusion
    // propagates the veto, arithmetic fusion keeps the hypothesis alive
    let mut vetoed = psis.clone();
    vetoed[1] = Belief::from_probabilities(&[0.0, 0.6, 0.4]).unwrap();
    println!("\nafter agent 1 vetoes hypothesis 0:");
    show("arithmetic", &fuse_aa(&vetoed, &w).unwrap());
    show("geometric", &fuse_ga(&vetoed, &w).unwrap());
}
