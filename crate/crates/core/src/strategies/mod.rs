//! Selection strategies and their materialization as policy tables.

mod bounds;
mod vote;
mod window;

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::pool::{CandidatePool, StatusVector};
use crate::posterior_oracle::{check_policy_cap, oracle_policy, PolicyTable};
use crate::ranking_models::RankingDistribution;

pub use bounds::{
    likelihood_spread, superstar_error_bound, superstar_error_bound_odds, vote_error_bound, BoundKind, ErrorBound,
    VoteBound,
};
pub use vote::{pairwise_vote_select, pairwise_vote_select_model, PairScore, VoteLedger, VoteMode};
pub use window::{superstar_select, superstar_window, Direction, WindowComputation};

pub(crate) use window::window_pick;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StrategySpec {
    FollowRanking,
    /// Top-ranked free candidate among the first `k`, else the top.
    KFree { k: usize },
    /// Top-ranked busy candidate among the first `k`, else the top.
    KBusy { k: usize },
    SuperstarAlgo,
    PairwiseVoteAlgo { vote_mode: VoteMode },
    OraclePolicyRef,
}

impl StrategySpec {
    pub fn validate(&self, n: usize) -> Result<()> {
        match self {
            StrategySpec::KFree { k } | StrategySpec::KBusy { k } if *k == 0 || *k > n => {
                invalid(format!("window {k} must lie in 1..={n}"))
            }
            _ => Ok(()),
        }
    }

    /// Picks that need only the status vector.
    pub fn simple_pick(&self, s: &StatusVector) -> Option<usize> {
        match self {
            StrategySpec::FollowRanking => Some(0),
            StrategySpec::KFree { k } => Some(window_pick(true, *k, s)),
            StrategySpec::KBusy { k } => Some(window_pick(false, *k, s)),
            _ => None,
        }
    }
}

impl fmt::Display for StrategySpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategySpec::FollowRanking => write!(f, "follow_ranking"),
            StrategySpec::KFree { k } => write!(f, "kfree_{k}"),
            StrategySpec::KBusy { k } => write!(f, "kbusy_{k}"),
            StrategySpec::SuperstarAlgo => write!(f, "superstar_algo"),
            StrategySpec::PairwiseVoteAlgo { vote_mode: VoteMode::Magnitude } => write!(f, "pairwise_vote"),
            StrategySpec::PairwiseVoteAlgo { vote_mode: VoteMode::Count } => write!(f, "pairwise_vote_count"),
            StrategySpec::OraclePolicyRef => write!(f, "oracle"),
        }
    }
}

impl FromStr for StrategySpec {
    type Err = Error;

    /// Parses the names produced by `Display`.
    fn from_str(s: &str) -> Result<Self> {
        let window = |rest: &str| {
            rest.parse::<usize>().map_err(|_| Error::InvalidInput(format!("bad window in strategy {s:?}")))
        };
        match s {
            "follow_ranking" => Ok(StrategySpec::FollowRanking),
            "superstar_algo" => Ok(StrategySpec::SuperstarAlgo),
            "pairwise_vote" => Ok(StrategySpec::PairwiseVoteAlgo { vote_mode: VoteMode::Magnitude }),
            "pairwise_vote_count" => Ok(StrategySpec::PairwiseVoteAlgo { vote_mode: VoteMode::Count }),
            "oracle" => Ok(StrategySpec::OraclePolicyRef),
            _ => {
                if let Some(rest) = s.strip_prefix("kfree_") {
                    Ok(StrategySpec::KFree { k: window(rest)? })
                } else if let Some(rest) = s.strip_prefix("kbusy_") {
                    Ok(StrategySpec::KBusy { k: window(rest)? })
                } else {
                    invalid(format!("unknown strategy {s:?}"))
                }
            }
        }
    }
}

/// Every strategy as a table from status vector to picked position.
pub fn strategy_as_policy(strategy: &StrategySpec, pool: &CandidatePool, dist: &RankingDistribution) -> Result<PolicyTable> {
    let n = pool.len();
    check_policy_cap(n)?;
    strategy.validate(n)?;
    if dist.n() != n {
        return invalid("distribution size differs from pool size");
    }
    match strategy {
        StrategySpec::FollowRanking | StrategySpec::KFree { .. } | StrategySpec::KBusy { .. } => {
            Ok(PolicyTable::from_fn(n, |s| strategy.simple_pick(s)))
        }
        StrategySpec::SuperstarAlgo => {
            let window = superstar_window(pool, &dist.superstar_view()?)?;
            Ok(PolicyTable::from_fn(n, |s| Some(superstar_select(&window, s))))
        }
        StrategySpec::PairwiseVoteAlgo { vote_mode } => {
            let mut decisions = HashMap::new();
            for top_free in [false, true] {
                for j in 1..n {
                    let ledger = pairwise_vote_select(pool, dist, top_free, j, *vote_mode)?;
                    decisions.insert((top_free, j), ledger.decision);
                }
            }
            Ok(PolicyTable::from_fn(n, |s| {
                Some(s.first_different().map_or(0, |j| decisions[&(s.is_free(0), j)]))
            }))
        }
        StrategySpec::OraclePolicyRef => oracle_policy(dist, pool),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking_models::superstar_index_probs;

    #[test]
    fn names_round_trip() {
        for s in [
            StrategySpec::FollowRanking,
            StrategySpec::KFree { k: 3 },
            StrategySpec::KBusy { k: 1 },
            StrategySpec::SuperstarAlgo,
            StrategySpec::PairwiseVoteAlgo { vote_mode: VoteMode::Count },
            StrategySpec::PairwiseVoteAlgo { vote_mode: VoteMode::Magnitude },
            StrategySpec::OraclePolicyRef,
        ] {
            assert_eq!(s.to_string().parse::<StrategySpec>().unwrap(), s);
        }
        assert!("kfree_x".parse::<StrategySpec>().is_err());
    }

    #[test]
    fn simple_tables() {
        let pool = CandidatePool::superstar(3, 1.0, 0.0, 0.2, 0.5, 2.0, 2.0).unwrap();
        let dist = RankingDistribution::Superstar(superstar_index_probs(1.0, 0.0, 3, 1.0).unwrap());
        let follow = strategy_as_policy(&StrategySpec::FollowRanking, &pool, &dist).unwrap();
        assert!(follow.picks().iter().all(|p| *p == Some(0)));
        let k1 = strategy_as_policy(&StrategySpec::KFree { k: 1 }, &pool, &dist).unwrap();
        assert_eq!(k1, follow);
        assert!(strategy_as_policy(&StrategySpec::KBusy { k: 4 }, &pool, &dist).is_err());
    }

    #[test]
    fn superstar_algo_table_matches_rule() {
        let pool = CandidatePool::superstar(3, 1.0, 0.0, 0.2, 0.5, 2.0, 2.0).unwrap();
        let d = superstar_index_probs(1.0, 0.0, 3, 1.0).unwrap();
        let window = superstar_window(&pool, &d).unwrap();
        let table = strategy_as_policy(&StrategySpec::SuperstarAlgo, &pool, &RankingDistribution::Superstar(d)).unwrap();
        for s in StatusVector::all(3) {
            assert_eq!(table.pick(&s), Some(superstar_select(&window, &s)));
        }
    }
}
