//! Effect of cross-agent correlation: identical Gaussian agents under
//! an equicorrelated Gaussian copula, sweeping the off-diagonal
//! correlation. The geometric rate is provably invariant; the
//! arithmetic rate climbs toward it as the agents' observations merge
//! into one effective observation.

use fedpool::asymptotics::{aa_params, ga_params};
use fedpool::belief::{ConfidenceWeights, HypothesisSet};
use fedpool::likelihood::{AgentModel, Correlation, Environment};
use fedpool::rng::{child_stream, StreamRole};

fn main() {
    let k = 10;
    let hs = HypothesisSet::new(2, 0).unwrap();
    let w = ConfidenceWeights::uniform(k);
    let agents = vec![
        AgentModel::Gaussian {
            means: vec![0.0, 1.0],
            std: 1.0,
        };
        k
    ];

    println!("{:>6} {:>8} {:>8} {:>10}", "corr", "rho_G", "rho_A", "sigma2_G");
    for &c in &[0.0, 0.25, 0.5, 0.75, 0.95] {
        let correlation = if c == 0.0 {
            Correlation::independent()
        } else {
            let mut m = vec![vec![c; k]; k];
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = 1.0;
            }
            Correlation::Matrix(m)
        };
        let env = Environment::new(agents.clone(), correlation, &hs).unwrap();
        let ga = ga_params(&env, &hs, &w, 1).unwrap();
        let mut rng = child_stream(11, (c * 100.0) as u64, StreamRole::ParamEstimation);
        let aa = aa_params(&env, &hs, &w, 1, 400_000, &mut rng).unwrap();
        println!("{c:>6.2} {:>8.4} {:>8.4} {:>10.4}", ga.rho, aa.rho, ga.sigma2);
    }
}
