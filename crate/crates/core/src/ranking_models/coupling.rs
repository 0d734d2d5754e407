//! Transition matrices that turn a more accurate superstar distribution into
//! a less accurate one.

use crate::error::{invalid, Result};

use super::accuracy::{compare_accuracy_superstar, AccuracyOrder};
use super::superstar::SuperstarDistribution;

const EPS: f64 = 1e-14;

/// Row-stochastic `T` with `sum_i more[i] * T[i][j] = less[j]`.
///
/// Built by repeatedly taking the first position with surplus mass `l` and
/// the first with a deficit `m`, then mixing the identity with the `(l, m)`
/// transposition just enough to close one of the two gaps. Each step closes
/// a gap, so at most `2n` steps are needed.
pub fn index_coupling(more: &SuperstarDistribution, less: &SuperstarDistribution) -> Result<Vec<Vec<f64>>> {
    match compare_accuracy_superstar(more, less)? {
        AccuracyOrder::AMoreAccurate | AccuracyOrder::Equal => {}
        other => return invalid(format!("first distribution is not more accurate ({other:?})")),
    }
    let n = more.n();
    let target = less.index_probs();
    let mut cur = more.index_probs().to_vec();
    let mut t: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(i == j)).collect()).collect();
    for _ in 0..2 * n + 2 {
        let Some(l) = (0..n).find(|&i| cur[i] > target[i] + EPS) else { break };
        let Some(m) = (0..n).find(|&i| cur[i] < target[i] - EPS) else { break };
        let surplus = cur[l] - target[l];
        let deficit = target[m] - cur[m];
        let moved = surplus.min(deficit);
        let spread = cur[l] - cur[m];
        if spread > moved {
            // (1 - a) I + a * swap(l, m) moves a * spread from l to m.
            let a = moved / spread;
            for row in t.iter_mut() {
                let (x, y) = (row[l], row[m]);
                row[l] = (1.0 - a) * x + a * y;
                row[m] = (1.0 - a) * y + a * x;
            }
        } else {
            // A transposition cannot close the gap; move the mass directly.
            let a = moved / cur[l];
            for row in t.iter_mut() {
                let x = row[l];
                row[l] = (1.0 - a) * x;
                row[m] += a * x;
            }
        }
        cur[l] -= moved;
        cur[m] += moved;
    }
    Ok(t)
}
