//! Additive error bounds for the windowed and voting strategies.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::pool::{odds, CandidatePool, StatusVector};
use crate::ranking_models::{RankingDistribution, SuperstarDistribution};

use super::vote::{orientation_gain, pair_score, PermProbs};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// Window strategy, `p2/p1` prefactor.
    SuperstarWindow,
    /// Window strategy, odds-ratio prefactor.
    SuperstarWindowOdds,
    /// Voting strategy picked position `j`.
    VotePickJ,
    /// Voting strategy picked the top.
    VotePickTop,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBound {
    pub bound_value: f64,
    pub kind: BoundKind,
}

fn superstar_bound(pool: &CandidatePool, dist: &SuperstarDistribution, j: usize, prefactor: f64, kind: BoundKind) -> Result<ErrorBound> {
    if !pool.is_superstar() {
        return invalid("pool is not a superstar pool");
    }
    if j == 0 || j >= dist.n() || dist.n() != pool.len() {
        return invalid(format!("position j = {j} must lie in 1..{}", dist.n()));
    }
    let v2 = pool.value(1);
    let g2 = pool.busy_penalty(1);
    let tail = (1.0 - dist.prob(0) - dist.prob(j)).max(0.0);
    Ok(ErrorBound { bound_value: prefactor * v2 * (1.0 - 1.0 / g2) * tail, kind })
}

/// `(p2/p1) * v2 * (1 - 1/g2) * (1 - P[high at top] - P[high at j])`, where
/// `j` is the first position whose status differs from the top.
pub fn superstar_error_bound(pool: &CandidatePool, dist: &SuperstarDistribution, j: usize) -> Result<ErrorBound> {
    let prefactor = pool.free_prob(1) / pool.free_prob(0);
    superstar_bound(pool, dist, j, prefactor, BoundKind::SuperstarWindow)
}

/// Same shape with the odds ratio `r` as prefactor. `r >= p2/p1`, and this
/// form still holds where the `p2/p1` form fails (free probabilities close
/// to 1).
pub fn superstar_error_bound_odds(pool: &CandidatePool, dist: &SuperstarDistribution, j: usize) -> Result<ErrorBound> {
    let prefactor = odds(pool.free_prob(1)) / odds(pool.free_prob(0));
    superstar_bound(pool, dist, j, prefactor, BoundKind::SuperstarWindowOdds)
}

/// Error bounds for one decision of the voting strategy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoteBound {
    /// Holds for the posterior loss against the better of the two positions.
    pub proof: ErrorBound,
    /// Shorter form without the likelihood coefficient and with plain value
    /// gaps. Not guaranteed.
    pub statement: ErrorBound,
    /// `max P[s|perm] / min P[s|perm]` over rankings.
    pub coefficient: f64,
    /// Part of `proof` from pairs that voted against the decision.
    pub opposing: f64,
    /// Part of `proof` from pairs that voted for it in their most
    /// top-favouring arrangement but could flip in another.
    pub bias: f64,
    /// Part of `proof` from pairs of equal-valued candidates.
    pub ties: f64,
}

/// `max_perm P[s|perm] / min_perm P[s|perm]`: the best and worst assignments
/// put the candidates with the largest and smallest free odds on the free
/// positions.
pub fn likelihood_spread(pool: &CandidatePool, s: &StatusVector) -> f64 {
    let mut o: Vec<f64> = pool.free_probs().iter().map(|p| odds(*p)).collect();
    o.sort_by(f64::total_cmp);
    let f = s.bits().iter().filter(|b| **b).count();
    let n = o.len();
    let top: f64 = o[n - f..].iter().product();
    let bottom: f64 = o[..f].iter().product();
    top / bottom
}

/// `P[{i, k} occupy positions {0, j}]`.
fn pair_position_prob(dist: &RankingDistribution, pool: &CandidatePool, i: usize, k: usize, j: usize) -> Result<f64> {
    let mut total = 0.0;
    for (p, perm) in dist.outcomes(pool)? {
        if let RankingDistribution::Superstar(_) = dist {
            // Representative rankings stand for all orders of the low block.
            total += p * superstar_pair_share(&perm, i, k, j);
        } else if (perm[0] == i && perm[j] == k) || (perm[0] == k && perm[j] == i) {
            total += p;
        }
    }
    Ok(total)
}

fn superstar_pair_share(perm: &[usize], i: usize, k: usize, j: usize) -> f64 {
    let n = perm.len() as f64;
    let high_at = perm.iter().position(|&c| c == 0).unwrap();
    match (i == 0 || k == 0, high_at == 0 || high_at == j) {
        // The low-value partner fills the other slot with chance 1/(n-1).
        (true, true) => 1.0 / (n - 1.0),
        (true, false) => 0.0,
        (false, true) => 0.0,
        // Both slots hold low-value candidates: 2 of (n-1)(n-2) ordered fills.
        (false, false) => 2.0 / ((n - 1.0) * (n - 2.0)),
    }
}

/// Bounds on the loss of picking `decision` (0 or the first position whose
/// status differs from the top) under status vector `s`.
pub fn vote_error_bound(pool: &CandidatePool, dist: &RankingDistribution, s: &StatusVector, decision: usize) -> Result<VoteBound> {
    let n = pool.len();
    if s.len() != n || dist.n() != n {
        return invalid("status vector, distribution and pool differ in size");
    }
    let Some(j) = s.first_different() else {
        if decision != 0 {
            return invalid("with a uniform status vector the decision must be the top");
        }
        let zero = ErrorBound { bound_value: 0.0, kind: BoundKind::VotePickTop };
        return Ok(VoteBound { proof: zero, statement: zero, coefficient: 1.0, opposing: 0.0, bias: 0.0, ties: 0.0 });
    };
    if decision != 0 && decision != j {
        return invalid(format!("decision must be 0 or {j}"));
    }
    let pick_j = decision == j;
    let top_free = s.is_free(0);
    let probs = PermProbs::Dist(dist);
    let c = likelihood_spread(pool, s);
    let v = pool.values();
    let (mut opposing, mut bias, mut ties) = (0.0, 0.0, 0.0);
    let (mut stmt_opposing, mut stmt_bias) = (0.0, 0.0);
    for i in 0..n {
        for k in i + 1..n {
            let g = [orientation_gain(pool, top_free, i, k), orientation_gain(pool, top_free, k, i)];
            // Largest loss (pick j) or gain forgone (pick top) per ranking.
            let worst = if pick_j { (-g[0]).max(-g[1]).max(0.0) } else { g[0].max(g[1]).max(0.0) };
            if worst == 0.0 {
                continue;
            }
            let mass = pair_position_prob(dist, pool, i, k, j)?;
            if v[i] == v[k] {
                ties += c * mass * worst;
                continue;
            }
            let (hi, lo) = if v[i] > v[k] { (i, k) } else { (k, i) };
            let g_best = pair_score(pool, &probs, top_free, j, hi, lo, false);
            let g_worst = pair_score(pool, &probs, top_free, j, hi, lo, true);
            let gap = v[hi] - v[lo];
            if pick_j {
                if g_best < 0.0 {
                    opposing += c * mass * worst;
                    stmt_opposing += mass * gap;
                }
            } else if g_best > 0.0 {
                opposing += c * mass * worst;
                stmt_opposing += mass * gap;
            } else if g_worst > 0.0 {
                bias += c * mass * worst;
                if g_best < 0.0 {
                    stmt_bias += mass * g_worst;
                }
            }
        }
    }
    let kind = if pick_j { BoundKind::VotePickJ } else { BoundKind::VotePickTop };
    Ok(VoteBound {
        proof: ErrorBound { bound_value: opposing + bias + ties, kind },
        statement: ErrorBound { bound_value: stmt_opposing + stmt_bias, kind },
        coefficient: c,
        opposing,
        bias,
        ties,
    })
}
