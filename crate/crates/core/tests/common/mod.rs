//! Brute-force references written independently of the library internals.

#![allow(dead_code)]

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use ranksel_core::CandidatePool;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// All permutations of `0..n`, in no particular order.
pub fn permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for c in 0..used.len() {
            if !used[c] {
                used[c] = true;
                prefix.push(c);
                go(prefix, used, out);
                prefix.pop();
                used[c] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

/// Sequential choice with unshifted weights `exp(v / beta)`.
pub fn pl_prob(values: &[f64], beta: f64, perm: &[usize]) -> f64 {
    let w: Vec<f64> = perm.iter().map(|&c| (values[c] / beta).exp()).collect();
    let mut p = 1.0;
    for j in 0..w.len() {
        p *= w[j] / w[j..].iter().sum::<f64>();
    }
    p
}

/// Rankings with their probabilities.
pub type Dist = Vec<(Vec<usize>, f64)>;

pub fn pl_dist(values: &[f64], beta: f64) -> Dist {
    permutations(values.len()).into_iter().map(|p| { let q = pl_prob(values, beta, &p); (p, q) }).collect()
}

/// Mallows over value inversions with strict pairs only.
pub fn mallows_dist(values: &[f64], phi: f64) -> Dist {
    let perms = permutations(values.len());
    let weights: Vec<f64> = perms
        .iter()
        .map(|p| {
            let mut k = 0;
            for a in 0..p.len() {
                for b in a + 1..p.len() {
                    if values[p[a]] < values[p[b]] {
                        k += 1;
                    }
                }
            }
            phi.powi(k)
        })
        .collect();
    let z: f64 = weights.iter().sum();
    perms.into_iter().zip(weights).map(|(p, w)| (p, w / z)).collect()
}

/// `s[a]` is whether position `a` is free; bit `a` of `mask`.
pub fn status(mask: usize, n: usize) -> Vec<bool> {
    (0..n).map(|a| mask >> a & 1 == 1).collect()
}

pub fn likelihood(pool: &CandidatePool, perm: &[usize], s: &[bool]) -> f64 {
    perm.iter()
        .zip(s)
        .map(|(&c, &f)| if f { pool.free_probs()[c] } else { 1.0 - pool.free_probs()[c] })
        .product()
}

pub fn utility(pool: &CandidatePool, c: usize, free: bool) -> f64 {
    let v = pool.values()[c];
    if free { v } else { v / pool.busy_penalties()[c] }
}

/// Joint `sum_perm P[perm] P[s|perm] u(position a)` per position, and `P[s]`.
pub fn joint(pool: &CandidatePool, dist: &Dist, s: &[bool]) -> (Vec<f64>, f64) {
    let n = s.len();
    let mut u = vec![0.0; n];
    let mut ps = 0.0;
    for (perm, p) in dist {
        let w = p * likelihood(pool, perm, s);
        ps += w;
        for a in 0..n {
            u[a] += w * utility(pool, perm[a], s[a]);
        }
    }
    (u, ps)
}

/// Posterior expected utility per position, `None` if `P[s] = 0`.
pub fn posterior(pool: &CandidatePool, dist: &Dist, s: &[bool]) -> Option<Vec<f64>> {
    let (u, ps) = joint(pool, dist, s);
    (ps > 0.0).then(|| u.iter().map(|x| x / ps).collect())
}

/// Expected utility of a pick rule.
pub fn policy_utility(pool: &CandidatePool, dist: &Dist, pick: impl Fn(&[bool]) -> usize) -> f64 {
    let n = pool.values().len();
    let mut total = 0.0;
    for mask in 0..1usize << n {
        let s = status(mask, n);
        let a = pick(&s);
        let (u, _) = joint(pool, dist, &s);
        total += u[a];
    }
    total
}

pub fn oracle_utility(pool: &CandidatePool, dist: &Dist) -> f64 {
    let n = pool.values().len();
    (0..1usize << n)
        .map(|mask| {
            let (u, _) = joint(pool, dist, &status(mask, n));
            u.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        })
        .sum()
}

/// First position within the window holding the wanted status, else the top.
pub fn window_pick(s: &[bool], want_free: bool, k: usize) -> usize {
    s.iter().take(k).position(|&f| f == want_free).unwrap_or(0)
}

/// `P[high-value candidate at position i]` from a full distribution.
pub fn index_probs(dist: &Dist, n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n];
    for (perm, p) in dist {
        out[perm.iter().position(|&c| c == 0).unwrap()] += p;
    }
    out
}

/// Random superstar pool with `p1 < p2`.
pub fn random_superstar(r: &mut impl Rng, n: usize, v2: f64) -> CandidatePool {
    let p1 = r.random_range(0.02..0.9);
    let p2 = r.random_range(p1 + 0.01..0.98);
    let g = r.random_range(1.0..10.0);
    CandidatePool::superstar(n, 1.0, v2, p1, p2, g, g).unwrap()
}

/// Random pool with nonincreasing values (ties allowed), free probabilities
/// nondecreasing down the list and a shared busy penalty.
pub fn random_pool(r: &mut impl Rng, n: usize) -> CandidatePool {
    let mut values: Vec<f64> = (0..n).map(|_| (r.random_range(0..6) as f64) / 5.0).collect();
    values.sort_by(|a, b| b.total_cmp(a));
    let mut probs: Vec<f64> = (0..n).map(|_| r.random_range(0.05..0.95)).collect();
    probs.sort_by(f64::total_cmp);
    // Tied values share a free probability.
    for a in 1..n {
        if values[a] == values[a - 1] {
            probs[a] = probs[a - 1];
        }
    }
    let g = r.random_range(1.0..6.0);
    CandidatePool::new(values, probs, vec![g; n]).unwrap()
}
