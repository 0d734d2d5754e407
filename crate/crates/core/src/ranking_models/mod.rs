//! Distributions over rankings: construction, evaluation, sampling and
//! accuracy comparisons.

mod accuracy;
mod coupling;
mod gaussian;
mod mallows;
mod monotone;
mod plackett_luce;
mod sampling;
mod superstar;
mod table;

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::perm::{factorial, value_order};
use crate::pool::CandidatePool;

pub use accuracy::{compare_accuracy_beyond, compare_accuracy_superstar, AccuracyOrder};
pub use coupling::index_coupling;
pub use gaussian::gaussian_rum_table;
pub use mallows::mallows_table;
pub use monotone::{is_inversion_monotone, InversionViolation, MonotoneReport};
pub use plackett_luce::{plackett_luce_prob, plackett_luce_table};
pub(crate) use plackett_luce::prob_unchecked as plackett_luce_prob_unchecked;
pub use sampling::{sample_ranking, RankingSampler};
pub use superstar::{superstar_index_probs, superstar_ratio, superstar_ratio_closed_form, SuperstarDistribution};
pub use table::PermutationTable;

/// A ranking model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelSpec {
    /// Gumbel noise with scale `beta` added to each value.
    PlackettLuce { beta: f64 },
    /// Normal noise with standard deviation `sigma` added to each value.
    GaussianRum { sigma: f64 },
    /// Mass proportional to `phi` per value inversion.
    Mallows { phi: f64 },
    Explicit { table: PermutationTable },
}

impl ModelSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            ModelSpec::PlackettLuce { beta } => plackett_luce::check_beta(*beta),
            ModelSpec::GaussianRum { sigma } => gaussian::normal(*sigma).map(|_| ()),
            ModelSpec::Mallows { phi } => mallows::check_phi(*phi),
            ModelSpec::Explicit { .. } => Ok(()),
        }
    }

    /// Exact table, for models that have one.
    pub fn exact_table(&self, pool: &CandidatePool) -> Result<PermutationTable> {
        match self {
            ModelSpec::PlackettLuce { beta } => plackett_luce_table(pool, *beta),
            ModelSpec::Mallows { phi } => mallows_table(pool, *phi),
            ModelSpec::Explicit { table } if table.n() == pool.len() => Ok(table.clone()),
            ModelSpec::Explicit { .. } => invalid("table size differs from pool size"),
            ModelSpec::GaussianRum { .. } => {
                invalid("the Gaussian model has no exact table; use gaussian_rum_table")
            }
        }
    }

    /// Exact distribution, collapsed to index probabilities for
    /// Plackett-Luce over superstar pools.
    pub fn distribution(&self, pool: &CandidatePool) -> Result<RankingDistribution> {
        match self {
            ModelSpec::PlackettLuce { beta } if pool.is_uniform_superstar() => Ok(RankingDistribution::Superstar(
                superstar_index_probs(pool.value(0), pool.value(1), pool.len(), *beta)?,
            )),
            _ => Ok(RankingDistribution::Table(self.exact_table(pool)?)),
        }
    }
}

/// Either superstar index probabilities or a full permutation table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RankingDistribution {
    Superstar(SuperstarDistribution),
    Table(PermutationTable),
}

impl RankingDistribution {
    pub fn n(&self) -> usize {
        match self {
            RankingDistribution::Superstar(d) => d.n(),
            RankingDistribution::Table(t) => t.n(),
        }
    }

    /// Probability of one ranking. For superstar distributions the low-value
    /// candidates are exchangeable, so each of their orders gets an equal share.
    pub fn perm_prob(&self, perm: &[usize]) -> f64 {
        match self {
            RankingDistribution::Superstar(d) => {
                let i = perm.iter().position(|&c| c == 0).expect("candidate 0 missing");
                d.prob(i) / factorial(d.n() - 1) as f64
            }
            RankingDistribution::Table(t) => t.prob(perm),
        }
    }

    /// Weighted rankings to sum over. A superstar distribution yields one
    /// representative ranking per position of the high-value candidate.
    pub fn outcomes(&self, pool: &CandidatePool) -> Result<Vec<(f64, Vec<usize>)>> {
        if self.n() != pool.len() {
            return invalid("distribution size differs from pool size");
        }
        match self {
            RankingDistribution::Superstar(d) => {
                if !pool.is_uniform_superstar() {
                    return invalid("superstar distributions need a superstar pool with a shared low-value penalty");
                }
                Ok((0..d.n()).filter(|&i| d.prob(i) > 0.0).map(|i| (d.prob(i), superstar_perm(d.n(), i))).collect())
            }
            RankingDistribution::Table(t) => Ok(t.support().map(|(perm, p)| (p, perm)).collect()),
        }
    }

    /// Index probabilities of candidate 0.
    pub fn superstar_view(&self) -> Result<SuperstarDistribution> {
        match self {
            RankingDistribution::Superstar(d) => Ok(d.clone()),
            RankingDistribution::Table(t) => t.to_superstar(0),
        }
    }
}

/// Candidate 0 at position `i`, the rest in index order.
pub(crate) fn superstar_perm(n: usize, i: usize) -> Vec<usize> {
    let mut perm: Vec<usize> = (1..n).collect();
    perm.insert(i, 0);
    perm
}

/// The ranking with candidate `i` on top, candidate `k` at position `j` and
/// everyone else in value order (reversed value order if `reversed`), along
/// with the same ranking with positions 0 and `j` swapped.
pub fn swap_pair(values: &[f64], i: usize, k: usize, j: usize, reversed: bool) -> (Vec<usize>, Vec<usize>) {
    let n = values.len();
    let mut rest: Vec<usize> = value_order(values).into_iter().filter(|&c| c != i && c != k).collect();
    if reversed {
        rest.reverse();
    }
    let mut rest = rest.into_iter();
    let sigma: Vec<usize> = (0..n)
        .map(|a| match a {
            0 => i,
            a if a == j => k,
            _ => rest.next().unwrap(),
        })
        .collect();
    let mut tilde = sigma.clone();
    tilde.swap(0, j);
    (sigma, tilde)
}
