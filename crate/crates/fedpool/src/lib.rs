//! Federated decision making on a star topology.
//!
//! A group of agents observes private data and shares only beliefs
//! (probability vectors over a finite hypothesis set) with a server,
//! which pools them by weighted arithmetic (AA) or geometric (GA)
//! averaging and broadcasts the result back. This crate simulates the
//! system, computes the convergence-rate and variance constants of both
//! rules, and verifies the normal approximation of the log-belief
//! ratios with Kolmogorov-Smirnov and Shapiro-Wilk tests.
//!
//! Start with the `examples/` directory: each example exercises one
//! capability end to end. The `fedpool` binary wraps the same machinery
//! for batch runs driven by JSON configs.

pub mod asymptotics;
pub mod belief;
pub mod config;
pub mod harness;
pub mod likelihood;
pub mod numeric;
pub mod pooling;
pub mod rng;
pub mod stats;

pub use belief::{Belief, ConfidenceWeights, HypothesisSet, TrajectoryRecord};
pub use config::{preset, RunConfig};
pub use harness::{compare_rules, run_experiment, write_outputs, AggregateReport};
pub use likelihood::{AgentModel, Correlation, Environment, Observation};
pub use pooling::{adapt, fuse_aa, fuse_ga, run_trajectories, run_trajectory, PoolingRule};
