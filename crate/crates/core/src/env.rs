//! Safe-bandit problem instances, sampling, and ground-truth gaps.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::stats::RngStream;

/// How observations are generated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    /// Reward ∼ Bern(μ) and risk ∼ Bern(ν), independently.
    #[default]
    BernoulliIndependent,
    /// Any pair of independent marginals on `[0, 1]`.
    GeneralBounded,
}

/// A law on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Marginal {
    Bernoulli { p: f64 },
    Point { value: f64 },
    Uniform { low: f64, high: f64 },
}

impl Marginal {
    pub fn mean(&self) -> f64 {
        match *self {
            Marginal::Bernoulli { p } => p,
            Marginal::Point { value } => value,
            Marginal::Uniform { low, high } => 0.5 * (low + high),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            Marginal::Bernoulli { p } => (0.0..=1.0).contains(&p),
            Marginal::Point { value } => (0.0..=1.0).contains(&value),
            Marginal::Uniform { low, high } => 0.0 <= low && low <= high && high <= 1.0,
        };
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidArgument(format!(
                "marginal {self:?} is not supported on [0, 1]"
            )))
        }
    }

    #[inline]
    fn draw(&self, rng: &mut RngStream) -> f64 {
        match *self {
            Marginal::Bernoulli { p } => {
                if rng.bernoulli(p) {
                    1.0
                } else {
                    0.0
                }
            }
            Marginal::Point { value } => value,
            Marginal::Uniform { low, high } => low + (high - low) * rng.uniform(),
        }
    }
}

/// Joint law of one arm: independent reward and risk marginals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArmLaw {
    pub reward: Marginal,
    pub risk: Marginal,
}

impl ArmLaw {
    pub fn bernoulli(mu: f64, nu: f64) -> Self {
        ArmLaw {
            reward: Marginal::Bernoulli { p: mu },
            risk: Marginal::Bernoulli { p: nu },
        }
    }

    pub fn mu(&self) -> f64 {
        self.reward.mean()
    }

    pub fn nu(&self) -> f64 {
        self.risk.mean()
    }
}

/// A safe-bandit environment. Immutable once built.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SafeBanditInstance {
    alpha: f64,
    family: Family,
    arms: Vec<ArmLaw>,
}

impl SafeBanditInstance {
    pub fn new(arms: Vec<ArmLaw>, alpha: f64, family: Family) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidArgument(format!(
                "alpha = {alpha} is not in [0, 1]"
            )));
        }
        if arms.is_empty() {
            return Err(Error::InvalidArgument("instance has no arms".into()));
        }
        for arm in &arms {
            arm.reward.validate()?;
            arm.risk.validate()?;
            if family == Family::BernoulliIndependent
                && !matches!(
                    (arm.reward, arm.risk),
                    (Marginal::Bernoulli { .. }, Marginal::Bernoulli { .. })
                )
            {
                return Err(Error::InvalidArgument(
                    "bernoulli-independent instances need Bernoulli marginals".into(),
                ));
            }
        }
        if !arms.iter().any(|a| a.nu() <= alpha) {
            return Err(Error::Infeasible { alpha });
        }
        Ok(SafeBanditInstance {
            alpha,
            family,
            arms,
        })
    }

    /// Independent Bernoulli arms from mean vectors.
    pub fn bernoulli(mu: &[f64], nu: &[f64], alpha: f64) -> Result<Self> {
        if mu.len() != nu.len() {
            return Err(Error::InvalidArgument(format!(
                "{} reward means but {} risk means",
                mu.len(),
                nu.len()
            )));
        }
        let arms = mu
            .iter()
            .zip(nu)
            .map(|(&m, &n)| ArmLaw::bernoulli(m, n))
            .collect();
        Self::new(arms, alpha, Family::BernoulliIndependent)
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn arms(&self) -> &[ArmLaw] {
        &self.arms
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn mu(&self) -> Vec<f64> {
        self.arms.iter().map(ArmLaw::mu).collect()
    }

    pub fn nu(&self) -> Vec<f64> {
        self.arms.iter().map(ArmLaw::nu).collect()
    }

    /// Same arms under a different risk level.
    pub fn with_alpha(&self, alpha: f64) -> Result<Self> {
        Self::new(self.arms.clone(), alpha, self.family)
    }

    /// Draws one `(reward, risk)` pair from `arm`.
    pub fn sample(&self, arm: usize, rng: &mut RngStream) -> Result<(f64, f64)> {
        let law = self.arms.get(arm).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "arm {arm} out of range for {} arms",
                self.arms.len()
            ))
        })?;
        let reward = law.reward.draw(rng);
        let risk = law.risk.draw(rng);
        Ok((reward, risk))
    }
}

/// Converts bounded observations into Bernoulli bits with the same means.
pub fn binarize(reward: f64, risk: f64, rng: &mut RngStream) -> (f64, f64) {
    let r = if rng.uniform() < reward { 1.0 } else { 0.0 };
    let s = if rng.uniform() < risk { 1.0 } else { 0.0 };
    (r, s)
}

/// Competitor and gaps of an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub alpha: f64,
    pub k_star: usize,
    pub mu_star: f64,
    pub nu_star: f64,
    /// Inefficiency gaps `max(0, μ* − μ^k)`.
    pub delta: Vec<f64>,
    /// Safety gaps `max(0, ν^k − α)`.
    pub gamma: Vec<f64>,
}

impl GroundTruth {
    pub fn num_arms(&self) -> usize {
        self.delta.len()
    }

    /// Per-round regret of playing `arm`: `Δ^arm ∨ Γ^arm`.
    #[inline]
    pub fn regret_increment(&self, arm: usize) -> f64 {
        self.delta[arm].max(self.gamma[arm])
    }

    #[inline]
    pub fn is_unsafe(&self, arm: usize) -> bool {
        self.gamma[arm] > 0.0
    }

    /// `true` when some arm other than `k_star` has both gaps zero.
    pub fn has_tied_competitor(&self) -> bool {
        (0..self.num_arms()).any(|k| k != self.k_star && self.regret_increment(k) == 0.0)
    }
}

/// Best safe arm (lowest index on ties) and the per-arm gaps.
pub fn ground_truth(instance: &SafeBanditInstance) -> Result<GroundTruth> {
    let alpha = instance.alpha;
    let mut best: Option<(usize, f64)> = None;
    for (k, arm) in instance.arms.iter().enumerate() {
        if arm.nu() <= alpha && best.map_or(true, |(_, m)| arm.mu() > m) {
            best = Some((k, arm.mu()));
        }
    }
    let (k_star, mu_star) = best.ok_or(Error::Infeasible { alpha })?;
    let delta = instance
        .arms
        .iter()
        .map(|a| (mu_star - a.mu()).max(0.0))
        .collect();
    let gamma = instance
        .arms
        .iter()
        .map(|a| (a.nu() - alpha).max(0.0))
        .collect();
    Ok(GroundTruth {
        alpha,
        k_star,
        mu_star,
        nu_star: instance.arms[k_star].nu(),
        delta,
        gamma,
    })
}

/// Per-round regret `Δ^arm ∨ Γ^arm`.
pub fn regret_increment(truth: &GroundTruth, arm: usize) -> Result<f64> {
    if arm >= truth.num_arms() {
        return Err(Error::InvalidArgument(format!("arm {arm} out of range")));
    }
    Ok(truth.regret_increment(arm))
}

/// Instances used in the simulation studies.
pub mod presets {
    use super::SafeBanditInstance;
    use crate::error::Result;

    /// Two arms `(μ, ν) = (½, 0)` and `(1, 1)`: the optimal arm is safe but
    /// the high-reward arm is always unsafe.
    pub fn two_arm_example(alpha: f64) -> Result<SafeBanditInstance> {
        SafeBanditInstance::bernoulli(&[0.5, 1.0], &[0.0, 1.0], alpha)
    }

    /// Efficacy and infection rates for five dosages of a rheumatoid-arthritis drug.
    pub const DRUG_TRIAL_MU: [f64; 5] = [0.360, 0.340, 0.469, 0.465, 0.537];
    pub const DRUG_TRIAL_NU: [f64; 5] = [0.160, 0.259, 0.184, 0.209, 0.293];

    pub fn drug_trial(alpha: f64) -> Result<SafeBanditInstance> {
        SafeBanditInstance::bernoulli(&DRUG_TRIAL_MU, &DRUG_TRIAL_NU, alpha)
    }

    /// Four arms with a known-safe `(0, 0)` arm and two optimal policies
    /// (all mass on arm 2, or an even mix of arms 1 and 3).
    pub fn policy_multiple_optimal() -> Result<SafeBanditInstance> {
        SafeBanditInstance::bernoulli(&[0.0, 0.4, 0.5, 0.6], &[0.0, 0.4, 0.5, 0.6], 0.5)
    }

    /// As [`policy_multiple_optimal`] with arm 2's reward raised to 0.6, so the
    /// optimal policy is supported on arm 2 alone.
    pub fn policy_single_optimal() -> Result<SafeBanditInstance> {
        SafeBanditInstance::bernoulli(&[0.0, 0.4, 0.6, 0.6], &[0.0, 0.4, 0.5, 0.6], 0.5)
    }

    /// `μ = ν = (0.5, 0.5 − i/25, 0.5 + i/25)` at `α = 0.5`.
    pub fn gap_large(i: f64) -> Result<SafeBanditInstance> {
        let g = i / 25.0;
        let m = [0.5, 0.5 - g, 0.5 + g];
        SafeBanditInstance::bernoulli(&m, &m, 0.5)
    }

    /// Same maximal gaps as [`gap_large`], with the smaller gap of each
    /// suboptimal arm shrunk tenfold.
    pub fn gap_small(i: f64) -> Result<SafeBanditInstance> {
        let (big, small) = (i / 25.0, i / 250.0);
        SafeBanditInstance::bernoulli(
            &[0.5, 0.5 - big, 0.5 + small],
            &[0.5, 0.5 + small, 0.5 + big],
            0.5,
        )
    }

    /// `μ = ν = (0.3, 0.5, 0.7)`; used to probe sampled safety indices.
    pub fn naive_ts(alpha: f64) -> Result<SafeBanditInstance> {
        let m = [0.3, 0.5, 0.7];
        SafeBanditInstance::bernoulli(&m, &m, alpha)
    }
}
