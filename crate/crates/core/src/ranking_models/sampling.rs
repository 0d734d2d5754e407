//! Drawing single rankings from a model.

use rand::seq::SliceRandom;
use rand::Rng;
use rand_distr::{Distribution, Gumbel, Normal};

use crate::error::{Error, Result};
use crate::perm::{unrank, value_order};
use crate::pool::CandidatePool;
use crate::rng::stream_rng;

use super::gaussian::normal;
use super::mallows::check_phi;
use super::plackett_luce::check_beta;
use super::ModelSpec;

/// Candidates sorted by score, highest first, ties by index.
pub(crate) fn rum_order(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}

/// A model prepared for repeated sampling against one pool.
#[derive(Debug, Clone)]
pub struct RankingSampler {
    values: Vec<f64>,
    kind: SamplerKind,
}

#[derive(Debug, Clone)]
enum SamplerKind {
    Gumbel(Gumbel<f64>),
    Normal(Normal<f64>),
    Mallows { phi: f64, reference: Vec<usize> },
    Table { n: usize, cumulative: Vec<f64> },
}

impl RankingSampler {
    pub fn new(spec: &ModelSpec, pool: &CandidatePool) -> Result<Self> {
        let kind = match spec {
            ModelSpec::PlackettLuce { beta } => {
                check_beta(*beta)?;
                SamplerKind::Gumbel(Gumbel::new(0.0, *beta).map_err(|e| Error::InvalidInput(e.to_string()))?)
            }
            ModelSpec::GaussianRum { sigma } => SamplerKind::Normal(normal(*sigma)?),
            ModelSpec::Mallows { phi } => {
                check_phi(*phi)?;
                SamplerKind::Mallows { phi: *phi, reference: value_order(pool.values()) }
            }
            ModelSpec::Explicit { table } => {
                if table.n() != pool.len() {
                    return Err(Error::InvalidInput("table size differs from pool size".into()));
                }
                let mut acc = 0.0;
                let cumulative = table
                    .probs()
                    .iter()
                    .map(|p| {
                        acc += p;
                        acc
                    })
                    .collect();
                SamplerKind::Table { n: table.n(), cumulative }
            }
        };
        Ok(Self { values: pool.values().to_vec(), kind })
    }

    /// Candidate per position, best first.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        match &self.kind {
            SamplerKind::Gumbel(noise) => self.noisy_order(rng, noise),
            SamplerKind::Normal(noise) => self.noisy_order(rng, noise),
            SamplerKind::Mallows { phi, reference } => self.mallows(rng, *phi, reference),
            SamplerKind::Table { n, cumulative } => {
                let u: f64 = rng.random::<f64>() * cumulative[cumulative.len() - 1];
                let r = cumulative.partition_point(|c| *c <= u).min(cumulative.len() - 1);
                unrank(r, *n)
            }
        }
    }

    fn noisy_order<R: Rng + ?Sized, D: Distribution<f64>>(&self, rng: &mut R, noise: &D) -> Vec<usize> {
        let scores: Vec<f64> = self.values.iter().map(|v| v + noise.sample(rng)).collect();
        rum_order(&scores)
    }

    /// Repeated insertion along the reference order, then a uniform shuffle
    /// of identities inside each block of tied values so ties carry no
    /// weight.
    fn mallows<R: Rng + ?Sized>(&self, rng: &mut R, phi: f64, reference: &[usize]) -> Vec<usize> {
        let mut perm: Vec<usize> = Vec::with_capacity(reference.len());
        for (i, &c) in reference.iter().enumerate() {
            // Inserting at slot `pos` puts `c` behind `i - pos` earlier items.
            let weights: Vec<f64> = (0..=i).map(|pos| phi.powi((i - pos) as i32)).collect();
            let mut u = rng.random::<f64>() * weights.iter().sum::<f64>();
            let mut slot = i;
            for (pos, w) in weights.iter().enumerate() {
                if u < *w {
                    slot = pos;
                    break;
                }
                u -= w;
            }
            perm.insert(slot, c);
        }
        let mut start = 0;
        while start < reference.len() {
            let v = self.values[reference[start]];
            let end = start + reference[start..].iter().take_while(|&&c| self.values[c] == v).count();
            if end - start > 1 {
                let positions: Vec<usize> =
                    (0..perm.len()).filter(|&a| self.values[perm[a]] == v).collect();
                let mut ids: Vec<usize> = positions.iter().map(|&a| perm[a]).collect();
                ids.shuffle(rng);
                for (a, c) in positions.into_iter().zip(ids) {
                    perm[a] = c;
                }
            }
            start = end;
        }
        perm
    }
}

/// One ranking drawn with a generator seeded by `seed`.
pub fn sample_ranking(spec: &ModelSpec, pool: &CandidatePool, seed: u64) -> Result<Vec<usize>> {
    let sampler = RankingSampler::new(spec, pool)?;
    Ok(sampler.sample(&mut stream_rng(seed, 0)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking_models::PermutationTable;

    fn pool3() -> CandidatePool {
        CandidatePool::new(vec![1.0, 0.5, 0.0], vec![0.1, 0.3, 0.5], vec![2.0; 3]).unwrap()
    }

    #[test]
    fn near_noiseless_is_identity() {
        for seed in 0..20 {
            let perm = sample_ranking(&ModelSpec::PlackettLuce { beta: 1e-3 }, &pool3(), seed).unwrap();
            assert_eq!(perm, vec![0, 1, 2]);
        }
    }

    #[test]
    fn point_mass_table() {
        let table = PermutationTable::from_entries(3, &[(vec![0, 2, 1], 1.0)], &[1.0, 0.5, 0.5]).unwrap();
        let spec = ModelSpec::Explicit { table };
        for seed in 0..20 {
            assert_eq!(sample_ranking(&spec, &pool3(), seed).unwrap(), vec![0, 2, 1]);
        }
    }

    #[test]
    fn same_seed_same_ranking() {
        let spec = ModelSpec::Mallows { phi: 0.7 };
        let a = sample_ranking(&spec, &pool3(), 99).unwrap();
        let b = sample_ranking(&spec, &pool3(), 99).unwrap();
        assert_eq!(a, b);
    }
}
