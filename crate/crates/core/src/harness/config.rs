use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::agents::AgentSpec;
use crate::env::{presets, ArmLaw, Family, SafeBanditInstance};
use crate::error::{Error, Result};

pub const DEFAULT_RECORD_STRIDE: u64 = 50;

fn default_stride() -> u64 {
    DEFAULT_RECORD_STRIDE
}

/// Named instances from the simulation studies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// `(μ, ν) = (½, 0), (1, 1)`; default α = 0.5.
    TwoArm,
    /// Dosage data; default α = 0.21.
    DrugTrial,
    PolicyMultipleOptimal,
    PolicySingleOptimal,
    /// Needs `i`.
    GapLarge,
    /// Needs `i`.
    GapSmall,
    /// `μ = ν = (0.3, 0.5, 0.7)`; default α = 0.5.
    NaiveTs,
}

/// Instance description: explicit Bernoulli means, explicit marginals, or a preset.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default)]
    pub family: Family,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nu: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arms: Option<Vec<ArmLaw>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<Preset>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub i: Option<f64>,
}

impl InstanceConfig {
    pub fn build(&self) -> Result<SafeBanditInstance> {
        let cfg = |msg: &str| Error::Config(msg.to_string());
        if let Some(preset) = self.preset {
            if self.mu.is_some() || self.nu.is_some() || self.arms.is_some() {
                return Err(cfg("`preset` cannot be combined with `mu`/`nu`/`arms`"));
            }
            let need_i = || self.i.ok_or_else(|| cfg("this preset needs `i`"));
            let inst = match preset {
                Preset::TwoArm => presets::two_arm_example(self.alpha.unwrap_or(0.5))?,
                Preset::DrugTrial => presets::drug_trial(self.alpha.unwrap_or(0.21))?,
                Preset::NaiveTs => presets::naive_ts(self.alpha.unwrap_or(0.5))?,
                Preset::PolicyMultipleOptimal => presets::policy_multiple_optimal()?,
                Preset::PolicySingleOptimal => presets::policy_single_optimal()?,
                Preset::GapLarge => presets::gap_large(need_i()?)?,
                Preset::GapSmall => presets::gap_small(need_i()?)?,
            };
            return match self.alpha {
                Some(a) if a != inst.alpha() => inst.with_alpha(a),
                _ => Ok(inst),
            };
        }
        let alpha = self.alpha.ok_or_else(|| cfg("instance needs `alpha`"))?;
        match (&self.mu, &self.nu, &self.arms) {
            (Some(mu), Some(nu), None) => {
                if mu.len() != nu.len() {
                    return Err(cfg("`mu` and `nu` differ in length"));
                }
                let arms = mu.iter().zip(nu).map(|(&m, &n)| ArmLaw::bernoulli(m, n)).collect();
                SafeBanditInstance::new(arms, alpha, self.family)
            }
            (None, None, Some(arms)) => SafeBanditInstance::new(arms.clone(), alpha, self.family),
            _ => Err(cfg("instance needs either `mu` and `nu`, `arms`, or `preset`")),
        }
    }
}

/// One experiment: an instance, a horizon, and the agents to compare.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instance: InstanceConfig,
    pub horizon: u64,
    pub trials: u64,
    pub agents: Vec<AgentSpec>,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default = "default_stride")]
    pub record_stride: u64,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Checks every invariant and returns the built instance.
    pub fn validate(&self) -> Result<SafeBanditInstance> {
        if self.horizon < 1 {
            return Err(Error::Config("horizon must be at least 1".into()));
        }
        if self.trials < 1 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.record_stride < 1 {
            return Err(Error::Config("record_stride must be at least 1".into()));
        }
        if self.agents.is_empty() {
            return Err(Error::Config("no agents listed".into()));
        }
        let instance = self.instance.build().map_err(as_config)?;
        let mut labels = std::collections::HashSet::new();
        for spec in &self.agents {
            if !labels.insert(spec.label()) {
                return Err(Error::Config(format!(
                    "duplicate agent label `{}`; set `name` to disambiguate",
                    spec.label()
                )));
            }
            spec.validate(instance.num_arms()).map_err(as_config)?;
        }
        if instance.num_arms() < 2 {
            return Err(Error::Config("agents need at least 2 arms".into()));
        }
        Ok(instance)
    }

    /// Copy with one parameter replaced; used by sweeps.
    ///
    /// Recognised names: `alpha`, `i`, `horizon`, `trials`, `base_seed`,
    /// `record_stride`, `slack_constant` (applied to every agent).
    pub fn with_param(&self, name: &str, value: f64) -> Result<Self> {
        let mut c = self.clone();
        let as_count = |v: f64| -> Result<u64> {
            if v >= 0.0 && v.fract() == 0.0 {
                Ok(v as u64)
            } else {
                Err(Error::Config(format!("{name} must be a non-negative integer, got {v}")))
            }
        };
        match name {
            "alpha" => c.instance.alpha = Some(value),
            "i" => c.instance.i = Some(value),
            "horizon" => c.horizon = as_count(value)?,
            "trials" => c.trials = as_count(value)?,
            "base_seed" => c.base_seed = as_count(value)?,
            "record_stride" => c.record_stride = as_count(value)?,
            "slack_constant" => {
                for a in &mut c.agents {
                    a.slack_constant = Some(value);
                }
            }
            other => {
                return Err(Error::Config(format!(
                    "unknown sweep parameter `{other}` (expected one of {})",
                    SWEEP_PARAMS.join(", ")
                )))
            }
        }
        Ok(c)
    }
}

pub const SWEEP_PARAMS: [&str; 7] = [
    "alpha",
    "i",
    "horizon",
    "trials",
    "base_seed",
    "record_stride",
    "slack_constant",
];

fn as_config(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}
