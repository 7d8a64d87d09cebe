use serde::Serialize;

use super::trial::TrialSeries;
use crate::error::{Error, Result};

/// Pointwise summary of one metric across trials.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub min: f64,
    pub max: f64,
}

/// Linear-interpolation quantile of sorted data.
fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

impl Summary {
    /// Summary of a non-empty sample; independent of the sample's order.
    pub fn of(values: &[f64]) -> Summary {
        assert!(!values.is_empty(), "summary of an empty sample");
        let mut sorted = values.to_vec();
        sorted.sort_by(f64::total_cmp);
        let mean = sorted.iter().sum::<f64>() / sorted.len() as f64;
        Summary {
            mean,
            median: quantile_sorted(&sorted, 0.5),
            q1: quantile_sorted(&sorted, 0.25),
            q3: quantile_sorted(&sorted, 0.75),
            min: sorted[0],
            max: sorted[sorted.len() - 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrialFailure {
    pub trial: u64,
    pub message: String,
}

/// Final-round values of one completed trial.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FinalValues {
    pub trial: u64,
    pub regret: f64,
    pub unsafe_plays: u64,
    pub violation: f64,
    pub pulls: Vec<u64>,
}

/// Pointwise statistics over the completed trials of one agent.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AggregateSeries {
    pub agent: String,
    pub t: Vec<u64>,
    pub regret: Vec<Summary>,
    pub unsafe_plays: Vec<Summary>,
    pub violation: Vec<Summary>,
    pub trials_completed: usize,
    pub failures: Vec<TrialFailure>,
    /// Sorted by trial index.
    pub finals: Vec<FinalValues>,
}

impl AggregateSeries {
    pub fn final_regret(&self) -> Option<&Summary> {
        self.regret.last()
    }

    pub fn final_unsafe(&self) -> Option<&Summary> {
        self.unsafe_plays.last()
    }

    /// Summary at the recorded round `t`, if it was recorded.
    pub fn at(&self, t: u64) -> Option<(Summary, Summary)> {
        let i = self.t.iter().position(|&x| x == t)?;
        Some((self.regret[i], self.unsafe_plays[i]))
    }

    /// Mean final pull count per arm.
    pub fn mean_pulls(&self) -> Vec<f64> {
        let Some(first) = self.finals.first() else {
            return Vec::new();
        };
        let n = self.finals.len() as f64;
        (0..first.pulls.len())
            .map(|k| self.finals.iter().map(|f| f.pulls[k] as f64).sum::<f64>() / n)
            .collect()
    }
}

/// Aggregates the completed trials of one agent; `failures` are carried along.
pub fn aggregate(
    agent: &str,
    trials: &[TrialSeries],
    failures: Vec<TrialFailure>,
) -> Result<AggregateSeries> {
    let t = trials.first().map(|s| s.t.clone()).unwrap_or_default();
    if trials.iter().any(|s| s.t != t) {
        return Err(Error::InvalidArgument(
            "trials were recorded on different rounds".into(),
        ));
    }
    let column = |f: &dyn Fn(&TrialSeries, usize) -> f64| -> Vec<Summary> {
        (0..t.len())
            .map(|i| Summary::of(&trials.iter().map(|s| f(s, i)).collect::<Vec<_>>()))
            .collect()
    };
    let mut finals: Vec<FinalValues> = trials
        .iter()
        .map(|s| FinalValues {
            trial: s.trial,
            regret: *s.regret.last().unwrap_or(&0.0),
            unsafe_plays: *s.unsafe_plays.last().unwrap_or(&0),
            violation: *s.violation.last().unwrap_or(&0.0),
            pulls: s.final_pulls.clone(),
        })
        .collect();
    finals.sort_by_key(|f| f.trial);
    let mut failures = failures;
    failures.sort_by_key(|f| f.trial);
    Ok(AggregateSeries {
        agent: agent.to_string(),
        regret: column(&|s, i| s.regret[i]),
        unsafe_plays: column(&|s, i| s.unsafe_plays[i] as f64),
        violation: column(&|s, i| s.violation[i]),
        t,
        trials_completed: trials.len(),
        failures,
        finals,
    })
}
