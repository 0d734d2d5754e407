//! Pairwise voting between the top position and the first position whose
//! status differs from it.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::pool::CandidatePool;
use crate::ranking_models::{swap_pair, ModelSpec, PermutationTable, RankingDistribution};

/// How pair scores are aggregated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VoteMode {
    /// Sum of score magnitudes on each side.
    #[default]
    Magnitude,
    /// Number of pairs on each side.
    Count,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairScore {
    /// Higher-valued candidate.
    pub i: usize,
    /// Lower-valued candidate.
    pub k: usize,
    /// Expected gain of picking position `j` over the top, for the pair in
    /// its most top-favouring arrangement. Positive votes for `j`.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoteLedger {
    pub j: usize,
    pub pair_scores: Vec<PairScore>,
    pub sum_positive: f64,
    /// Sum of the negative scores (a nonpositive number).
    pub sum_negative: f64,
    pub count_positive: usize,
    pub count_negative: usize,
    /// Either 0 (the top) or `j`.
    pub decision: usize,
}

/// Source of ranking probabilities for the constructed pairs.
pub(crate) enum PermProbs<'a> {
    Dist(&'a RankingDistribution),
    PlackettLuce { values: &'a [f64], beta: f64 },
    Table(PermutationTable),
}

impl PermProbs<'_> {
    pub(crate) fn prob(&self, perm: &[usize]) -> f64 {
        match self {
            PermProbs::Dist(d) => d.perm_prob(perm),
            PermProbs::PlackettLuce { values, beta } => {
                crate::ranking_models::plackett_luce_prob_unchecked(values, *beta, perm)
            }
            PermProbs::Table(t) => t.prob(perm),
        }
    }
}

/// Gains of picking position `j` instead of the top when candidate `a` is on
/// top and `b` sits at `j`.
pub(crate) fn orientation_gain(pool: &CandidatePool, top_free: bool, a: usize, b: usize) -> f64 {
    pool.utility(b, !top_free) - pool.utility(a, top_free)
}

/// Odds factor `p_k (1 - p_i) / ((1 - p_k) p_i)`.
pub(crate) fn pair_odds(pool: &CandidatePool, i: usize, k: usize) -> f64 {
    let (pi, pk) = (pool.free_prob(i), pool.free_prob(k));
    pk * (1.0 - pi) / ((1.0 - pk) * pi)
}

/// Pair score with the status likelihood of the `(k on top, i at j)`
/// arrangement factored out (top busy) or of `(i on top, k at j)` (top free).
pub(crate) fn pair_score(
    pool: &CandidatePool,
    probs: &PermProbs<'_>,
    top_free: bool,
    j: usize,
    i: usize,
    k: usize,
    reversed: bool,
) -> f64 {
    let (sigma, tilde) = swap_pair(pool.values(), i, k, j, reversed);
    let (ps, pt) = (probs.prob(&sigma), probs.prob(&tilde));
    let r = pair_odds(pool, i, k);
    let g_sigma = orientation_gain(pool, top_free, i, k);
    let g_tilde = orientation_gain(pool, top_free, k, i);
    if top_free {
        ps * g_sigma + r * pt * g_tilde
    } else {
        r * ps * g_sigma + pt * g_tilde
    }
}

pub(crate) fn vote(pool: &CandidatePool, probs: &PermProbs<'_>, top_free: bool, j: usize, mode: VoteMode) -> Result<VoteLedger> {
    let n = pool.len();
    if j == 0 || j >= n {
        return invalid(format!("j must lie in 1..{n}, got {j}"));
    }
    let v = pool.values();
    let mut pair_scores = Vec::new();
    for i in 0..n {
        for k in 0..n {
            if v[i] > v[k] {
                pair_scores.push(PairScore { i, k, score: pair_score(pool, probs, top_free, j, i, k, false) });
            }
        }
    }
    let sum_positive: f64 = pair_scores.iter().map(|p| p.score).filter(|x| *x > 0.0).sum();
    let sum_negative: f64 = pair_scores.iter().map(|p| p.score).filter(|x| *x < 0.0).sum();
    let count_positive = pair_scores.iter().filter(|p| p.score > 0.0).count();
    let count_negative = pair_scores.iter().filter(|p| p.score < 0.0).count();
    let pick_j = match mode {
        VoteMode::Magnitude => sum_positive > -sum_negative,
        VoteMode::Count => count_positive > count_negative,
    };
    Ok(VoteLedger {
        j,
        pair_scores,
        sum_positive,
        sum_negative,
        count_positive,
        count_negative,
        decision: if pick_j { j } else { 0 },
    })
}

/// Votes between the top position (status `top_free`) and position `j`
/// (opposite status) using an exact distribution.
pub fn pairwise_vote_select(
    pool: &CandidatePool,
    dist: &RankingDistribution,
    top_free: bool,
    j: usize,
    mode: VoteMode,
) -> Result<VoteLedger> {
    if dist.n() != pool.len() {
        return invalid("distribution size differs from pool size");
    }
    vote(pool, &PermProbs::Dist(dist), top_free, j, mode)
}

/// As [`pairwise_vote_select`], taking probabilities from a model.
/// Plackett-Luce probabilities are evaluated directly, so any `n` works.
pub fn pairwise_vote_select_model(
    pool: &CandidatePool,
    model: &ModelSpec,
    top_free: bool,
    j: usize,
    mode: VoteMode,
) -> Result<VoteLedger> {
    model.validate()?;
    let probs = match model {
        ModelSpec::PlackettLuce { beta } => PermProbs::PlackettLuce { values: pool.values(), beta: *beta },
        other => PermProbs::Table(other.exact_table(pool)?),
    };
    vote(pool, &probs, top_free, j, mode)
}
