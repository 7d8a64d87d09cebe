use serde::Serialize;

use super::config::ExperimentConfig;
use crate::agents::{Agent, AgentSpec};
use crate::env::{binarize, ground_truth, Family, GroundTruth, SafeBanditInstance};
use crate::error::{Error, Result};
use crate::stats::{derive_seed, RngStream};

const ENV_STREAM: u64 = 0;
const AGENT_STREAM: u64 = 1;
const BINARIZE_STREAM: u64 = 2;

/// Metrics of one seeded trial, recorded every `record_stride` rounds and at the horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialSeries {
    pub agent: String,
    pub trial: u64,
    pub t: Vec<u64>,
    /// Cumulative regret `Σ Δ^{A_s} ∨ Γ^{A_s}`.
    pub regret: Vec<f64>,
    /// Rounds on which an unsafe arm was played.
    pub unsafe_plays: Vec<u64>,
    /// Cumulative violation magnitude `Σ (ν^{A_s} − α)₊`.
    pub violation: Vec<f64>,
    pub final_pulls: Vec<u64>,
}

/// FNV-1a; keys each agent's streams by its label.
fn label_key(label: &str) -> u64 {
    label.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01B3)
    })
}

/// Seed of trial `trial_index` for the agent labelled `label`.
pub fn trial_seed(base_seed: u64, label: &str, trial_index: u64) -> u64 {
    derive_seed(base_seed, &[label_key(label), trial_index])
}

/// Runs one trial from a config, building the instance afresh.
pub fn run_trial(config: &ExperimentConfig, spec: &AgentSpec, trial_index: u64) -> Result<TrialSeries> {
    let instance = config.validate()?;
    let truth = ground_truth(&instance)?;
    run_trial_on(&instance, &truth, config, spec, trial_index)
}

/// Runs one trial against a prebuilt instance.
pub fn run_trial_on(
    instance: &SafeBanditInstance,
    truth: &GroundTruth,
    config: &ExperimentConfig,
    spec: &AgentSpec,
    trial_index: u64,
) -> Result<TrialSeries> {
    let label = spec.label();
    simulate(instance, truth, config, spec, &label, trial_index).map_err(|e| Error::Trial {
        agent: label.clone(),
        trial: trial_index,
        source: Box::new(e),
    })
}

fn simulate(
    instance: &SafeBanditInstance,
    truth: &GroundTruth,
    config: &ExperimentConfig,
    spec: &AgentSpec,
    label: &str,
    trial_index: u64,
) -> Result<TrialSeries> {
    let seed = trial_seed(config.base_seed, label, trial_index);
    let mut env_rng = RngStream::from_seed(derive_seed(seed, &[ENV_STREAM]));
    let mut bit_rng = RngStream::from_seed(derive_seed(seed, &[BINARIZE_STREAM]));
    let agent_rng = RngStream::from_seed(derive_seed(seed, &[AGENT_STREAM]));
    let mut agent = Agent::new(spec.clone(), instance.num_arms(), instance.alpha(), agent_rng)?;
    let binarized =
        instance.family() == Family::GeneralBounded && spec.algorithm.is_bayesian();

    let horizon = config.horizon;
    let stride = config.record_stride;
    let capacity = (horizon / stride + 1) as usize;
    let mut series = TrialSeries {
        agent: label.to_string(),
        trial: trial_index,
        t: Vec::with_capacity(capacity),
        regret: Vec::with_capacity(capacity),
        unsafe_plays: Vec::with_capacity(capacity),
        violation: Vec::with_capacity(capacity),
        final_pulls: Vec::new(),
    };
    let (mut regret, mut unsafe_plays, mut violation) = (0.0, 0u64, 0.0);
    for t in 1..=horizon {
        let arm = agent.act(t)?;
        let (mut reward, mut risk) = instance.sample(arm, &mut env_rng)?;
        if binarized {
            (reward, risk) = binarize(reward, risk, &mut bit_rng);
        }
        agent.observe(arm, reward, risk)?;
        regret += truth.regret_increment(arm);
        if truth.is_unsafe(arm) {
            unsafe_plays += 1;
            violation += truth.gamma[arm];
        }
        if t % stride == 0 || t == horizon {
            series.t.push(t);
            series.regret.push(regret);
            series.unsafe_plays.push(unsafe_plays);
            series.violation.push(violation);
        }
    }
    series.final_pulls = agent.stats().iter().map(|s| s.n).collect();
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::agents::Algorithm;

    fn config(text: &str) -> ExperimentConfig {
        ExperimentConfig::from_json(text).unwrap()
    }

    #[test]
    fn single_round() {
        let c = config(
            r#"{"instance": {"preset": "drug-trial"}, "horizon": 1, "trials": 1,
                "agents": [{"algorithm": "tsbu"}]}"#,
        );
        let s = run_trial(&c, &c.agents[0], 0).unwrap();
        assert_eq!(s.t, vec![1]);
        let arm = s.final_pulls.iter().position(|&n| n == 1).unwrap();
        let truth = ground_truth(&c.validate().unwrap()).unwrap();
        assert_eq!(s.regret, vec![truth.regret_increment(arm)]);
    }

    #[test]
    fn deterministic_and_monotone() {
        let c = config(
            r#"{"instance": {"preset": "drug-trial"}, "horizon": 2000, "trials": 1,
                "record_stride": 7, "agents": [{"algorithm": "topsi"}]}"#,
        );
        let a = run_trial(&c, &c.agents[0], 3).unwrap();
        let b = run_trial(&c, &c.agents[0], 3).unwrap();
        assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
        assert_eq!(*a.t.last().unwrap(), 2000);
        assert_eq!(a.t.len(), 2000 / 7 + 1);
        for w in a.regret.windows(2) {
            assert!(w[0] <= w[1]);
        }
        for (i, w) in a.unsafe_plays.windows(2).enumerate() {
            assert!(w[0] <= w[1]);
            assert!(w[1] <= a.t[i + 1]);
        }
        assert_eq!(a.final_pulls.iter().sum::<u64>(), 2000);
        let other = run_trial(&c, &c.agents[0], 4).unwrap();
        assert_ne!(a.regret, other.regret);
    }

    #[test]
    fn adding_agents_leaves_streams_unchanged() {
        let one = config(
            r#"{"instance": {"preset": "naive-ts"}, "horizon": 300, "trials": 1,
                "agents": [{"algorithm": "topsi"}]}"#,
        );
        let two = config(
            r#"{"instance": {"preset": "naive-ts"}, "horizon": 300, "trials": 1,
                "agents": [{"algorithm": "docb"}, {"algorithm": "topsi"}]}"#,
        );
        let a = run_trial(&one, &one.agents[0], 0).unwrap();
        let b = run_trial(&two, &two.agents[1], 0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn unsafe_plays_bound_violation() {
        let c = config(
            r#"{"instance": {"preset": "drug-trial"}, "horizon": 3000, "trials": 1,
                "agents": [{"algorithm": "docb"}]}"#,
        );
        let truth = ground_truth(&c.validate().unwrap()).unwrap();
        let min_gap = truth.gamma.iter().copied().filter(|&g| g > 0.0).fold(f64::INFINITY, f64::min);
        let s = run_trial(&c, &c.agents[0], 1).unwrap();
        for i in 0..s.t.len() {
            assert!(s.unsafe_plays[i] as f64 * min_gap <= s.violation[i] + 1e-9);
            assert!(s.violation[i] <= s.regret[i] + 1e-9);
        }
    }

    #[test]
    fn general_bounded_runs_with_binarization() {
        let c = config(
            r#"{"instance": {"alpha": 0.4, "family": "general-bounded", "arms": [
                    {"reward": {"kind": "uniform", "low": 0.2, "high": 0.4},
                     "risk": {"kind": "point", "value": 0.1}},
                    {"reward": {"kind": "point", "value": 0.9},
                     "risk": {"kind": "uniform", "low": 0.6, "high": 1.0}}]},
                "horizon": 3000, "trials": 1,
                "agents": [{"algorithm": "tsbu"}, {"algorithm": "docb"}]}"#,
        );
        for spec in &c.agents {
            let s = run_trial(&c, spec, 0).unwrap();
            // The unsafe arm (ν = 0.8) is identified and left.
            assert!(s.final_pulls[1] < 300, "{}: {:?}", spec.label(), s.final_pulls);
        }
    }

    #[test]
    fn labels_key_streams() {
        let base = 5;
        let a = trial_seed(base, &AgentSpec::new(Algorithm::Docb).label(), 0);
        let b = trial_seed(base, &AgentSpec::new(Algorithm::Topsi).label(), 0);
        assert_ne!(a, b);
        assert_ne!(a, trial_seed(base, "docb", 1));
    }

    mod properties {
        use super::*;
        use crate::harness::InstanceConfig;
        use proptest::prelude::*;

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(48))]

            #[test]
            fn series_invariants(
                mu in proptest::collection::vec(0.0f64..=1.0, 3),
                nu in proptest::collection::vec(0.0f64..=1.0, 3),
                alpha in 0.2f64..0.9,
                algorithm in proptest::sample::select(Algorithm::ALL.to_vec()),
                horizon in 1u64..400,
                stride in 1u64..60,
                seed in any::<u64>(),
            ) {
                let mut nu = nu;
                nu[0] = nu[0].min(alpha);
                let spec = match algorithm {
                    Algorithm::NaiveTsSlack => AgentSpec::new(algorithm).with_slack(0.5),
                    Algorithm::Pess => AgentSpec::new(algorithm).with_known_safe_arm(0),
                    _ => AgentSpec::new(algorithm),
                };
                let c = ExperimentConfig {
                    instance: InstanceConfig {
                        alpha: Some(alpha),
                        mu: Some(mu),
                        nu: Some(nu),
                        ..Default::default()
                    },
                    horizon,
                    trials: 1,
                    agents: vec![spec],
                    base_seed: seed,
                    record_stride: stride,
                };
                let truth = ground_truth(&c.validate().unwrap()).unwrap();
                let min_gap = truth.gamma.iter().copied().filter(|&g| g > 0.0).fold(1.0, f64::min);
                let s = run_trial(&c, &c.agents[0], 0).unwrap();
                prop_assert_eq!(*s.t.last().unwrap(), horizon);
                prop_assert_eq!(s.final_pulls.iter().sum::<u64>(), horizon);
                for i in 0..s.t.len() {
                    prop_assert!(s.regret[i] >= 0.0);
                    prop_assert!(s.unsafe_plays[i] <= s.t[i]);
                    prop_assert!(s.unsafe_plays[i] as f64 * min_gap <= s.violation[i] + 1e-9);
                    prop_assert!(s.violation[i] <= s.regret[i] + 1e-9);
                    if i > 0 {
                        prop_assert!(s.t[i - 1] < s.t[i]);
                        prop_assert!(s.regret[i - 1] <= s.regret[i]);
                        prop_assert!(s.unsafe_plays[i - 1] <= s.unsafe_plays[i]);
                        prop_assert!(s.violation[i - 1] <= s.violation[i]);
                    }
                }
            }
        }
    }
}
