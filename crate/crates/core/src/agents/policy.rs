//! Linear programs over distributions on arms with one risk constraint.
//!
//! `max ⟨π, reward⟩ s.t. ⟨π, risk⟩ ≤ α` over the simplex always has an
//! optimum supported on at most two arms, so it suffices to solve every pair.

use crate::error::{Error, Result};

/// Optimal distribution on a pair of arms.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairPolicy {
    pub value: f64,
    pub weights: (f64, f64),
}

/// Best distribution on `{i, j}` under the reward and risk indices.
pub fn pairwise_policy_value(
    idx_reward: &[f64],
    idx_risk: &[f64],
    alpha: f64,
    i: usize,
    j: usize,
) -> Result<PairPolicy> {
    let k = idx_reward.len();
    if idx_risk.len() != k || i >= k || j >= k {
        return Err(Error::InvalidArgument(format!(
            "pair ({i}, {j}) invalid for index vectors of lengths {k} and {}",
            idx_risk.len()
        )));
    }
    let (ri, rj) = (idx_reward[i], idx_reward[j]);
    let (bi, bj) = (idx_risk[i], idx_risk[j]);
    let policy = match (bi <= alpha, bj <= alpha) {
        (true, true) => {
            if ri >= rj {
                PairPolicy { value: ri, weights: (1.0, 0.0) }
            } else {
                PairPolicy { value: rj, weights: (0.0, 1.0) }
            }
        }
        (false, false) => return Err(Error::InadmissiblePair(i, j)),
        (safe_i, _) => {
            let (rs, ru, bs, bu) = if safe_i { (ri, rj, bi, bj) } else { (rj, ri, bj, bi) };
            let (ws, wu) = if rs >= ru {
                (1.0, 0.0)
            } else {
                // Risk constraint tight: ws·bs + wu·bu = α.
                let wu = (alpha - bs) / (bu - bs);
                (1.0 - wu, wu)
            };
            let value = ws * rs + wu * ru;
            let weights = if safe_i { (ws, wu) } else { (wu, ws) };
            PairPolicy { value, weights }
        }
    };
    Ok(policy)
}

/// Optimal two-arm policy over all pairs `i < j`; ties go to the first pair found.
/// Returns `None` when no pair is admissible.
pub fn best_pair_policy(
    idx_reward: &[f64],
    idx_risk: &[f64],
    alpha: f64,
) -> Option<(usize, usize, PairPolicy)> {
    let k = idx_reward.len();
    let mut best: Option<(usize, usize, PairPolicy)> = None;
    for i in 0..k {
        for j in (i + 1)..k {
            if let Ok(p) = pairwise_policy_value(idx_reward, idx_risk, alpha, i, j) {
                if best.map_or(true, |(_, _, b)| p.value > b.value) {
                    best = Some((i, j, p));
                }
            }
        }
    }
    best
}
