//! Explicit probability tables over permutations.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{invalid, Result};
use crate::perm::{check_cap, factorial, is_bijection, rank, unrank};

use super::superstar::SuperstarDistribution;

const SUM_TOLERANCE: f64 = 1e-9;

/// Probability of every permutation of `0..n`, stored densely in
/// lexicographic order. Empirical tables also carry a standard error per cell.
#[derive(Debug, Clone, PartialEq)]
pub struct PermutationTable {
    n: usize,
    probs: Vec<f64>,
    stderr: Option<Vec<f64>>,
}

impl PermutationTable {
    /// Builds a table from listed permutations; unlisted ones get mass 0.
    ///
    /// Also requires the expected value at each position to be
    /// nonincreasing, which is what makes a ranking informative.
    pub fn from_entries(n: usize, entries: &[(Vec<usize>, f64)], values: &[f64]) -> Result<Self> {
        check_cap(n)?;
        let mut probs = vec![0.0; factorial(n)];
        for (perm, p) in entries {
            if !is_bijection(perm, n) {
                return invalid(format!("{perm:?} is not a permutation of 0..{n}"));
            }
            probs[rank(perm)] += p;
        }
        let table = Self::from_dense(n, probs)?;
        if values.len() != n {
            return invalid("value vector length differs from table size");
        }
        let ev = table.position_values(values);
        if ev.windows(2).any(|w| w[1] > w[0] + SUM_TOLERANCE) {
            return invalid(format!("expected value by position is not nonincreasing: {ev:?}"));
        }
        Ok(table)
    }

    /// Dense table in lexicographic order, checked for normalization only.
    pub fn from_dense(n: usize, probs: Vec<f64>) -> Result<Self> {
        check_cap(n)?;
        if probs.len() != factorial(n) {
            return invalid(format!("expected {} cells, got {}", factorial(n), probs.len()));
        }
        if probs.iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return invalid("table probabilities must be finite and nonnegative");
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return invalid(format!("table probabilities sum to {total}"));
        }
        Ok(Self { n, probs, stderr: None })
    }

    pub(crate) fn with_stderr(mut self, stderr: Vec<f64>) -> Self {
        self.stderr = Some(stderr);
        self
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn stderr(&self) -> Option<&[f64]> {
        self.stderr.as_deref()
    }

    /// Largest per-cell standard error, 0 for exact tables.
    pub fn max_stderr(&self) -> f64 {
        self.stderr.as_ref().map_or(0.0, |s| s.iter().cloned().fold(0.0, f64::max))
    }

    pub fn prob(&self, perm: &[usize]) -> f64 {
        self.probs[rank(perm)]
    }

    pub fn total(&self) -> f64 {
        self.probs.iter().sum()
    }

    /// Permutations with positive mass, paired with their probability.
    pub fn support(&self) -> impl Iterator<Item = (Vec<usize>, f64)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(move |(r, p)| (unrank(r, self.n), *p))
    }

    /// `E[v at position a]` for each position.
    pub fn position_values(&self, values: &[f64]) -> Vec<f64> {
        let mut ev = vec![0.0; self.n];
        for (perm, p) in self.support() {
            for (a, &c) in perm.iter().enumerate() {
                ev[a] += p * values[c];
            }
        }
        ev
    }

    /// `P[candidate c is within the first k positions]`, indexed `[c][k-1]`.
    pub fn top_k_probs(&self) -> Vec<Vec<f64>> {
        let mut m = vec![vec![0.0; self.n]; self.n];
        for (perm, p) in self.support() {
            for (a, &c) in perm.iter().enumerate() {
                for cell in &mut m[c][a..] {
                    *cell += p;
                }
            }
        }
        m
    }

    /// Probability that `candidate` sits at each position.
    pub fn position_probs(&self, candidate: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (perm, p) in self.support() {
            let a = perm.iter().position(|&c| c == candidate).unwrap();
            out[a] += p;
        }
        out
    }

    /// Collapses the table onto the position of `candidate`.
    pub fn to_superstar(&self, candidate: usize) -> Result<SuperstarDistribution> {
        SuperstarDistribution::from_probs(self.position_probs(candidate))
    }
}

#[derive(Serialize, Deserialize)]
struct TableEntry {
    perm: Vec<usize>,
    prob: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stderr: Option<f64>,
}

#[derive(Serialize, Deserialize)]
struct TableLayout {
    n: usize,
    entries: Vec<TableEntry>,
}

impl Serialize for PermutationTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let entries = (0..self.probs.len())
            .filter(|&r| self.probs[r] > 0.0)
            .map(|r| TableEntry {
                perm: unrank(r, self.n),
                prob: self.probs[r],
                stderr: self.stderr.as_ref().map(|s| s[r]),
            })
            .collect();
        TableLayout { n: self.n, entries }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for PermutationTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let layout = TableLayout::deserialize(deserializer)?;
        let n = layout.n;
        check_cap(n).map_err(serde::de::Error::custom)?;
        let mut probs = vec![0.0; factorial(n)];
        let mut stderr = vec![0.0; factorial(n)];
        let mut has_stderr = false;
        for e in &layout.entries {
            if !is_bijection(&e.perm, n) {
                return Err(serde::de::Error::custom(format!("{:?} is not a permutation", e.perm)));
            }
            probs[rank(&e.perm)] += e.prob;
            if let Some(s) = e.stderr {
                stderr[rank(&e.perm)] = s;
                has_stderr = true;
            }
        }
        let table = Self::from_dense(n, probs).map_err(serde::de::Error::custom)?;
        Ok(if has_stderr { table.with_stderr(stderr) } else { table })
    }
}
