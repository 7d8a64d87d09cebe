//! Decision policies for safe bandits.
//!
//! Every agent keeps per-arm counts and alternates strictly between
//! [`Agent::act`] and [`Agent::observe`]. The permissible set of the index
//! policies (`docb`, `topsi`, `tsbu`) is a deterministic function of the
//! history; only the Thompson scores inside it are random.

mod policy;
mod schedule;

use serde::{Deserialize, Serialize};

pub use policy::{best_pair_policy, pairwise_policy_value, PairPolicy};
pub use schedule::{kl_budget, DeltaSchedule, GammaSchedule};

use crate::error::{Error, Result};
use crate::stats::{
    beta_cdf, beta_quantile, beta_sample, beta_std_dev, bisection_rounds,
    kl_ucb_invert_lower_rounds, kl_ucb_invert_upper_rounds, BetaParams, RngStream,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    /// KL-UCB reward index, KL-LCB safety filter.
    Docb,
    /// Thompson sampling on rewards, KL-LCB safety filter.
    Topsi,
    /// Thompson sampling on rewards, Beta-quantile safety filter.
    Tsbu,
    /// Thompson sampling on rewards, sampled posterior safety score.
    NaiveTs,
    /// As `naive-ts` with a slack proportional to the posterior spread.
    NaiveTsSlack,
    /// Policy baseline: optimistic reward, optimistic risk.
    Bwcr,
    /// Policy baseline: optimistic reward, pessimistic risk, known safe arm.
    Pess,
}

impl Algorithm {
    pub const ALL: [Algorithm; 7] = [
        Algorithm::Docb,
        Algorithm::Topsi,
        Algorithm::Tsbu,
        Algorithm::NaiveTs,
        Algorithm::NaiveTsSlack,
        Algorithm::Bwcr,
        Algorithm::Pess,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Docb => "docb",
            Algorithm::Topsi => "topsi",
            Algorithm::Tsbu => "tsbu",
            Algorithm::NaiveTs => "naive-ts",
            Algorithm::NaiveTsSlack => "naive-ts-slack",
            Algorithm::Bwcr => "bwcr",
            Algorithm::Pess => "pess",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Algorithm::Docb => "doubly optimistic KL-UCB reward index with KL-LCB safety filter",
            Algorithm::Topsi => "Thompson sampling with optimistic KL-LCB safety indices",
            Algorithm::Tsbu => "Thompson sampling with Beta-quantile (BayesUCB) safety indices",
            Algorithm::NaiveTs => "Thompson sampling with sampled posterior safety scores",
            Algorithm::NaiveTsSlack => "naive-ts with slack C * posterior sd * sqrt(ln t)",
            Algorithm::Bwcr => "two-arm policy LP with optimistic reward and risk indices",
            Algorithm::Pess => "two-arm policy LP with pessimistic risk and a known safe arm",
        }
    }

    /// Agents that consume Bernoulli observations through Beta posteriors.
    pub fn is_bayesian(self) -> bool {
        matches!(
            self,
            Algorithm::Topsi | Algorithm::Tsbu | Algorithm::NaiveTs | Algorithm::NaiveTsSlack
        )
    }

    fn round_robin(self) -> bool {
        matches!(self, Algorithm::Docb | Algorithm::Topsi)
    }
}

/// Algorithm choice plus hyper-parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AgentSpec {
    pub algorithm: Algorithm,
    #[serde(default)]
    pub gamma_schedule: GammaSchedule,
    #[serde(default)]
    pub delta_schedule: DeltaSchedule,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slack_constant: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_safe_arm: Option<usize>,
    /// Display name; also keys the agent's random streams.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
}

impl AgentSpec {
    pub fn new(algorithm: Algorithm) -> Self {
        AgentSpec {
            algorithm,
            gamma_schedule: GammaSchedule::default(),
            delta_schedule: DeltaSchedule::default(),
            slack_constant: None,
            known_safe_arm: None,
            name: None,
        }
    }

    pub fn with_slack(mut self, c: f64) -> Self {
        self.slack_constant = Some(c);
        self
    }

    pub fn with_known_safe_arm(mut self, arm: usize) -> Self {
        self.known_safe_arm = Some(arm);
        self
    }

    pub fn with_gamma(mut self, schedule: GammaSchedule) -> Self {
        self.gamma_schedule = schedule;
        self
    }

    pub fn with_delta(mut self, schedule: DeltaSchedule) -> Self {
        self.delta_schedule = schedule;
        self
    }

    pub fn named(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    /// Stable identifier: the explicit name, else one built from the
    /// parameters that affect behaviour.
    pub fn label(&self) -> String {
        if let Some(name) = &self.name {
            return name.clone();
        }
        let mut label = self.algorithm.name().to_string();
        match self.algorithm {
            Algorithm::Docb | Algorithm::Topsi | Algorithm::Bwcr | Algorithm::Pess => {
                if self.gamma_schedule == GammaSchedule::Theoretical {
                    label.push_str("-theoretical-gamma");
                }
            }
            Algorithm::Tsbu => {
                if self.delta_schedule == DeltaSchedule::Theoretical {
                    label.push_str("-theoretical-delta");
                }
            }
            Algorithm::NaiveTs => {}
            Algorithm::NaiveTsSlack => {
                if let Some(c) = self.slack_constant {
                    label.push_str(&format!("-c{c}"));
                }
            }
        }
        if let (Algorithm::Pess, Some(k)) = (self.algorithm, self.known_safe_arm) {
            label.push_str(&format!("-safe{k}"));
        }
        label
    }

    pub fn validate(&self, num_arms: usize) -> Result<()> {
        match self.algorithm {
            Algorithm::NaiveTsSlack => match self.slack_constant {
                Some(c) if c.is_finite() && c >= 0.0 => {}
                Some(c) => {
                    return Err(Error::InvalidSpec(format!(
                        "slack_constant must be finite and non-negative, got {c}"
                    )))
                }
                None => {
                    return Err(Error::InvalidSpec(
                        "naive-ts-slack requires slack_constant".into(),
                    ))
                }
            },
            Algorithm::Pess => match self.known_safe_arm {
                Some(k) if k < num_arms => {}
                Some(k) => {
                    return Err(Error::InvalidSpec(format!(
                        "known_safe_arm {k} out of range for {num_arms} arms"
                    )))
                }
                None => return Err(Error::InvalidSpec("pess requires known_safe_arm".into())),
            },
            _ => {}
        }
        Ok(())
    }
}

/// Running sufficient statistics of one arm.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ArmStatistics {
    pub n: u64,
    pub sum_r: f64,
    pub sum_s: f64,
}

impl ArmStatistics {
    pub fn mean_reward(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum_r / self.n as f64)
    }

    pub fn mean_risk(&self) -> Option<f64> {
        (self.n > 0).then(|| self.sum_s / self.n as f64)
    }

    fn reward_posterior(&self) -> BetaParams {
        BetaParams::posterior(self.sum_r, self.n as f64)
            .expect("counts keep posterior shapes positive")
    }

    fn risk_posterior(&self) -> BetaParams {
        BetaParams::posterior(self.sum_s, self.n as f64)
            .expect("counts keep posterior shapes positive")
    }
}

/// Mask of arms that are plausibly safe at the current round.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PermissibleSet(Vec<bool>);

impl PermissibleSet {
    pub fn from_indices(indices: &[f64], alpha: f64) -> Self {
        PermissibleSet(indices.iter().map(|&l| l <= alpha).collect())
    }

    pub fn contains(&self, arm: usize) -> bool {
        self.0.get(arm).copied().unwrap_or(false)
    }

    pub fn is_empty(&self) -> bool {
        !self.0.iter().any(|&b| b)
    }

    pub fn len(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn arms(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(k, _)| k)
    }

    pub fn mask(&self) -> &[bool] {
        &self.0
    }
}

/// Index of the largest score among permitted arms; lowest index on ties.
pub fn argmax_permitted(scores: &[f64], permitted: &PermissibleSet) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for k in permitted.arms() {
        if best.map_or(true, |(_, s)| scores[k] > s) {
            best = Some((k, scores[k]));
        }
    }
    best.map(|(k, _)| k)
}

fn argmin(values: &[f64]) -> usize {
    let mut best = 0;
    for (k, &v) in values.iter().enumerate() {
        if v < values[best] {
            best = k;
        }
    }
    best
}

/// A safe-bandit agent: a single-owner state machine.
#[derive(Debug, Clone)]
pub struct Agent {
    spec: AgentSpec,
    alpha: f64,
    stats: Vec<ArmStatistics>,
    rng: RngStream,
    observed: u64,
    pending: Option<usize>,
    /// `tsbu`: cached `F_k(α)` of the Beta(S, N − S + 1) safety posterior.
    cdf_at_alpha: Vec<Option<f64>>,
}

impl Agent {
    pub fn new(spec: AgentSpec, num_arms: usize, alpha: f64, rng: RngStream) -> Result<Self> {
        if num_arms < 2 {
            return Err(Error::InvalidSpec(format!(
                "agents need at least 2 arms, got {num_arms}"
            )));
        }
        if !(0.0..=1.0).contains(&alpha) {
            return Err(Error::InvalidArgument(format!("alpha = {alpha} not in [0, 1]")));
        }
        spec.validate(num_arms)?;
        Ok(Agent {
            spec,
            alpha,
            stats: vec![ArmStatistics::default(); num_arms],
            rng,
            observed: 0,
            pending: None,
            cdf_at_alpha: vec![None; num_arms],
        })
    }

    pub fn spec(&self) -> &AgentSpec {
        &self.spec
    }

    pub fn num_arms(&self) -> usize {
        self.stats.len()
    }

    pub fn stats(&self) -> &[ArmStatistics] {
        &self.stats
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    /// Chooses the arm for round `t` (1-based, one more than the observations so far).
    pub fn act(&mut self, t: u64) -> Result<usize> {
        if self.pending.is_some() {
            return Err(Error::Protocol(format!(
                "act({t}) called before observing the previous action"
            )));
        }
        if t != self.observed + 1 {
            return Err(Error::Protocol(format!(
                "act({t}) out of order: expected round {}",
                self.observed + 1
            )));
        }
        let k = self.num_arms();
        let arm = if self.spec.algorithm.round_robin() && t <= k as u64 {
            (t - 1) as usize
        } else {
            match self.spec.algorithm {
                Algorithm::Docb => self.act_docb(t),
                Algorithm::Topsi => self.act_topsi(t),
                Algorithm::Tsbu => self.act_tsbu(t)?,
                Algorithm::NaiveTs | Algorithm::NaiveTsSlack => self.act_naive(t),
                Algorithm::Bwcr | Algorithm::Pess => self.act_policy(t),
            }
        };
        debug_assert!(arm < k);
        self.pending = Some(arm);
        Ok(arm)
    }

    /// Records the outcome of the pending action.
    pub fn observe(&mut self, arm: usize, reward: f64, risk: f64) -> Result<()> {
        match self.pending {
            Some(p) if p == arm => {}
            Some(p) => {
                return Err(Error::Protocol(format!(
                    "observe for arm {arm} but the pending action is arm {p}"
                )))
            }
            None => return Err(Error::Protocol("observe without a pending action".into())),
        }
        if !(0.0..=1.0).contains(&reward) || !(0.0..=1.0).contains(&risk) {
            return Err(Error::InvalidArgument(format!(
                "observation ({reward}, {risk}) outside [0, 1]²"
            )));
        }
        let s = &mut self.stats[arm];
        s.n += 1;
        s.sum_r += reward;
        s.sum_s += risk;
        self.cdf_at_alpha[arm] = None;
        self.observed += 1;
        self.pending = None;
        Ok(())
    }

    /// KL-LCB safety indices `L_t^k` as used by `docb` and `topsi` at round `t`.
    pub fn klucb_safety_indices(&self, t: u64) -> Vec<f64> {
        let gamma = self.spec.gamma_schedule.budget(t);
        let rounds = bisection_rounds(t);
        self.stats
            .iter()
            .map(|s| match s.mean_risk() {
                Some(nu_hat) => kl_ucb_invert_lower_rounds(nu_hat, kl_budget(gamma, s.n), rounds),
                None => 0.0,
            })
            .collect()
    }

    /// KL-UCB reward indices `U_t^k` at round `t`.
    pub fn klucb_reward_indices(&self, t: u64) -> Vec<f64> {
        let gamma = self.spec.gamma_schedule.budget(t);
        let rounds = bisection_rounds(t);
        self.stats
            .iter()
            .map(|s| match s.mean_reward() {
                Some(mu_hat) => kl_ucb_invert_upper_rounds(mu_hat, kl_budget(gamma, s.n), rounds),
                None => 1.0,
            })
            .collect()
    }

    /// Pessimistic (upper) KL bound on each arm's risk.
    pub fn klucb_risk_upper_indices(&self, t: u64) -> Vec<f64> {
        let gamma = self.spec.gamma_schedule.budget(t);
        let rounds = bisection_rounds(t);
        self.stats
            .iter()
            .map(|s| match s.mean_risk() {
                Some(nu_hat) => kl_ucb_invert_upper_rounds(nu_hat, kl_budget(gamma, s.n), rounds),
                None => 1.0,
            })
            .collect()
    }

    /// Quantile level `δ_t^k` used by `tsbu` for `arm`.
    pub fn quantile_level(&self, t: u64, arm: usize) -> f64 {
        self.spec
            .delta_schedule
            .level(self.alpha, t, self.stats[arm].n)
    }

    /// Beta-quantile safety indices of `tsbu`: zero when no risk has been
    /// observed, else the `δ_t^k`-quantile of Beta(S, N − S + 1).
    pub fn bayes_safety_indices(&self, t: u64) -> Result<Vec<f64>> {
        (0..self.num_arms())
            .map(|k| {
                let delta = self.quantile_level(t, k);
                bayes_safety_index(&self.stats[k], delta)
            })
            .collect()
    }

    /// The permissible set the agent would use at round `t`.
    ///
    /// Defined for the index policies only; the other algorithms either
    /// randomise it or do not filter arms.
    pub fn permissible_set(&self, t: u64) -> Result<PermissibleSet> {
        match self.spec.algorithm {
            Algorithm::Docb | Algorithm::Topsi => Ok(PermissibleSet::from_indices(
                &self.klucb_safety_indices(t),
                self.alpha,
            )),
            Algorithm::Tsbu => {
                let mask = (0..self.num_arms())
                    .map(|k| self.tsbu_permits(t, k))
                    .collect::<Result<Vec<_>>>()?;
                Ok(PermissibleSet(mask))
            }
            other => Err(Error::InvalidSpec(format!(
                "{} has no deterministic permissible set",
                other.name()
            ))),
        }
    }

    fn act_docb(&mut self, t: u64) -> usize {
        let lower = self.klucb_safety_indices(t);
        let permitted = PermissibleSet::from_indices(&lower, self.alpha);
        if permitted.is_empty() {
            return argmin(&lower);
        }
        let upper = self.klucb_reward_indices(t);
        argmax_permitted(&upper, &permitted).expect("non-empty set")
    }

    fn thompson_within(&mut self, permitted: &PermissibleSet) -> usize {
        let mut best: Option<(usize, f64)> = None;
        for k in permitted.arms() {
            let rho = beta_sample(self.stats[k].reward_posterior(), &mut self.rng);
            if best.map_or(true, |(_, b)| rho > b) {
                best = Some((k, rho));
            }
        }
        best.expect("non-empty set").0
    }

    fn act_topsi(&mut self, t: u64) -> usize {
        let lower = self.klucb_safety_indices(t);
        let permitted = PermissibleSet::from_indices(&lower, self.alpha);
        if permitted.is_empty() {
            return argmin(&lower);
        }
        self.thompson_within(&permitted)
    }

    /// `Q(δ) ≤ α ⇔ δ ≤ F(α)` for the continuous increasing CDF `F`, and
    /// `F(α)` only changes when the arm is observed, so it is cached.
    fn tsbu_permits(&self, t: u64, arm: usize) -> Result<bool> {
        let s = &self.stats[arm];
        if s.sum_s == 0.0 {
            return Ok(true);
        }
        let delta = self.quantile_level(t, arm);
        let f = match self.cdf_at_alpha[arm] {
            Some(f) => f,
            None => beta_cdf(bayes_safety_posterior(s)?, self.alpha)?,
        };
        Ok(delta <= f)
    }

    fn act_tsbu(&mut self, t: u64) -> Result<usize> {
        for k in 0..self.num_arms() {
            if self.cdf_at_alpha[k].is_none() && self.stats[k].sum_s > 0.0 {
                let f = beta_cdf(bayes_safety_posterior(&self.stats[k])?, self.alpha)?;
                self.cdf_at_alpha[k] = Some(f);
            }
        }
        let permitted = self.permissible_set(t)?;
        if permitted.is_empty() {
            let lower = self.bayes_safety_indices(t)?;
            return Ok(argmin(&lower));
        }
        Ok(self.thompson_within(&permitted))
    }

    fn act_naive(&mut self, t: u64) -> usize {
        let slack_c = match self.spec.algorithm {
            Algorithm::NaiveTsSlack => self.spec.slack_constant.unwrap_or(0.0),
            _ => 0.0,
        };
        let log_t = (t as f64).ln().max(0.0).sqrt();
        let mut scores = Vec::with_capacity(self.num_arms());
        let mut mask = Vec::with_capacity(self.num_arms());
        for k in 0..self.num_arms() {
            let posterior = self.stats[k].risk_posterior();
            let theta = beta_sample(posterior, &mut self.rng);
            let slack = slack_c * beta_std_dev(posterior) * log_t;
            scores.push(theta);
            mask.push(theta <= self.alpha + slack);
        }
        let permitted = PermissibleSet(mask);
        if permitted.is_empty() {
            return argmin(&scores);
        }
        self.thompson_within(&permitted)
    }

    fn act_policy(&mut self, t: u64) -> usize {
        let reward = self.klucb_reward_indices(t);
        let risk = match self.spec.algorithm {
            Algorithm::Pess => {
                let mut upper = self.klucb_risk_upper_indices(t);
                if let Some(k) = self.spec.known_safe_arm {
                    upper[k] = upper[k].min(self.alpha);
                }
                upper
            }
            _ => self.klucb_safety_indices(t),
        };
        match best_pair_policy(&reward, &risk, self.alpha) {
            Some((i, j, p)) => {
                if self.rng.uniform() < p.weights.0 {
                    i
                } else {
                    j
                }
            }
            None => argmin(&risk),
        }
    }
}

fn bayes_safety_posterior(s: &ArmStatistics) -> Result<BetaParams> {
    BetaParams::new(s.sum_s, s.n as f64 - s.sum_s + 1.0)
}

/// `tsbu` safety index for one arm at quantile level `delta`.
pub fn bayes_safety_index(s: &ArmStatistics, delta: f64) -> Result<f64> {
    if s.sum_s == 0.0 || delta <= 0.0 {
        return Ok(0.0);
    }
    beta_quantile(bayes_safety_posterior(s)?, delta)
}
