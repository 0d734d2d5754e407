//! Windowed first-free / first-busy selection for superstar pools.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::pool::{CandidatePool, StatusVector};
use crate::ranking_models::SuperstarDistribution;

/// Which status the firm hunts for inside its window.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    FirstFree,
    FirstBusy,
}

impl Direction {
    pub fn wants_free(self) -> bool {
        self == Direction::FirstFree
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Direction::FirstFree => "first_free",
            Direction::FirstBusy => "first_busy",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowComputation {
    /// Odds ratio `(p2/(1-p2)) / (p1/(1-p1))`.
    pub ratio_r: f64,
    /// `R = (v1/g1 - v2) / (v1 - v2/g2) * r`.
    pub threshold_r: f64,
    pub direction: Direction,
    /// Bound on `P[high at 1] / P[high at j]`: `1/R` when hunting free
    /// candidates (infinite when `R <= 0`), `R` when hunting busy ones.
    pub ratio_limit: f64,
    /// Number of leading positions searched, at least 1.
    pub window_jstar: usize,
}

/// Direction and window size for a superstar pool.
pub fn superstar_window(pool: &CandidatePool, dist: &SuperstarDistribution) -> Result<WindowComputation> {
    if !pool.is_superstar() {
        return invalid("pool is not a superstar pool");
    }
    if dist.n() != pool.len() {
        return invalid("distribution size differs from pool size");
    }
    let (v1, v2) = (pool.value(0), pool.value(1));
    let (g1, g2) = (pool.busy_penalty(0), pool.busy_penalty(1));
    let denom = v1 - v2 / g2;
    if denom <= 0.0 {
        return Err(Error::DegenerateParameters("v1 - v2/gamma2 must be positive".into()));
    }
    let ratio_r = pool.free_busy_ratio();
    let threshold_r = (v1 / g1 - v2) / denom * ratio_r;
    let (direction, ratio_limit) = if threshold_r <= 0.0 {
        // A free low-value candidate is never worse than a busy top one.
        (Direction::FirstFree, f64::INFINITY)
    } else if threshold_r <= 1.0 {
        (Direction::FirstFree, 1.0 / threshold_r)
    } else {
        (Direction::FirstBusy, threshold_r)
    };
    let p = dist.index_probs();
    let window_jstar = if ratio_limit.is_infinite() {
        pool.len()
    } else {
        (1..=p.len()).filter(|&j| p[0] <= ratio_limit * p[j - 1]).max().unwrap_or(1)
    };
    Ok(WindowComputation { ratio_r, threshold_r, direction, ratio_limit, window_jstar })
}

/// First position inside the window with the preferred status, else the top.
pub fn superstar_select(window: &WindowComputation, s: &StatusVector) -> usize {
    window_pick(window.direction.wants_free(), window.window_jstar, s)
}

pub(crate) fn window_pick(want_free: bool, k: usize, s: &StatusVector) -> usize {
    s.bits().iter().take(k).position(|&free| free == want_free).unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ranking_models::superstar_index_probs;

    fn setup(gamma: f64) -> WindowComputation {
        let pool = CandidatePool::superstar(3, 1.0, 0.0, 0.2, 0.5, gamma, gamma).unwrap();
        let dist = superstar_index_probs(1.0, 0.0, 3, 1.0).unwrap();
        superstar_window(&pool, &dist).unwrap()
    }

    #[test]
    fn busy_window_at_gamma_two() {
        let w = setup(2.0);
        assert!((w.ratio_r - 4.0).abs() < 1e-12);
        assert!((w.threshold_r - 2.0).abs() < 1e-12);
        assert_eq!(w.direction, Direction::FirstBusy);
        assert_eq!(w.window_jstar, 2);
    }

    #[test]
    fn free_window_at_gamma_eight() {
        let w = setup(8.0);
        assert_eq!(w.direction, Direction::FirstFree);
        assert!((w.ratio_limit - 2.0).abs() < 1e-12);
        assert_eq!(w.window_jstar, 2);
    }

    #[test]
    fn noiseless_ranking_collapses_window() {
        let pool = CandidatePool::superstar(5, 1.0, 0.0, 0.2, 0.5, 2.0, 2.0).unwrap();
        let dist = superstar_index_probs(1.0, 0.0, 5, 1e-3).unwrap();
        assert_eq!(superstar_window(&pool, &dist).unwrap().window_jstar, 1);
    }

    #[test]
    fn selection_rules() {
        let busy2 = setup(2.0);
        assert_eq!(superstar_select(&busy2, &StatusVector::from_ints(&[1, 0, 1])), 1);
        let free = setup(8.0);
        assert_eq!(superstar_select(&free, &StatusVector::from_ints(&[1, 0, 0])), 0);
        let wide = WindowComputation { window_jstar: 3, ..busy2 };
        assert_eq!(superstar_select(&wide, &StatusVector::from_ints(&[1, 1, 1, 0])), 0);
    }
}
