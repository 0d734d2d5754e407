//! Hiring from noisy rankings when candidates may already be taken.

pub mod error;
pub mod experiment;
pub mod market_sim;
pub mod perm;
pub mod pool;
pub mod posterior_oracle;
pub mod ranking_models;
pub mod rng;
pub mod strategies;
pub mod welfare_metrics;

pub use error::{Error, Result};
pub use pool::{CandidatePool, StatusVector};
pub use ranking_models::{ModelSpec, PermutationTable, RankingDistribution, SuperstarDistribution};
pub use strategies::StrategySpec;
