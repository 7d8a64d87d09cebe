use serde::Serialize;

use super::config::ExperimentConfig;
use super::run_experiment;
use crate::error::Result;

/// Final-round metrics of one agent at one grid point, or the error that stopped the point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: String,
    pub value: f64,
    pub agent: String,
    pub trials_completed: usize,
    pub failed_trials: usize,
    pub regret_median: Option<f64>,
    pub regret_mean: Option<f64>,
    pub unsafe_median: Option<f64>,
    pub unsafe_mean: Option<f64>,
    pub error: Option<String>,
}

impl SweepRow {
    fn failed(param: &str, value: f64, agent: String, error: String) -> Self {
        SweepRow {
            param: param.to_string(),
            value,
            agent,
            trials_completed: 0,
            failed_trials: 0,
            regret_median: None,
            regret_mean: None,
            unsafe_median: None,
            unsafe_mean: None,
            error: Some(error),
        }
    }
}

/// Runs `template` once per value of `param`. A failing point yields error rows; the sweep continues.
pub fn sweep(
    template: &ExperimentConfig,
    param: &str,
    values: &[f64],
    workers: usize,
) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(crate::Error::Config("sweep grid is empty".into()));
    }
    // An unknown parameter name is a config error, not a per-point failure.
    template.with_param(param, values[0])?;
    let mut rows = Vec::new();
    for &value in values {
        let outcome = template
            .with_param(param, value)
            .and_then(|c| run_experiment(&c, workers));
        match outcome {
            Ok(aggs) => rows.extend(aggs.into_iter().map(|a| {
                let regret = a.final_regret().copied();
                let unsafe_plays = a.final_unsafe().copied();
                SweepRow {
                    param: param.to_string(),
                    value,
                    trials_completed: a.trials_completed,
                    failed_trials: a.failures.len(),
                    regret_median: regret.map(|s| s.median),
                    regret_mean: regret.map(|s| s.mean),
                    unsafe_median: unsafe_plays.map(|s| s.median),
                    unsafe_mean: unsafe_plays.map(|s| s.mean),
                    error: (a.trials_completed == 0).then(|| "every trial failed".to_string()),
                    agent: a.agent,
                }
            })),
            Err(e) => rows.extend(
                template
                    .agents
                    .iter()
                    .map(|s| SweepRow::failed(param, value, s.label(), e.to_string())),
            ),
        }
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn template() -> ExperimentConfig {
        ExperimentConfig::from_json(
            r#"{"instance": {"preset": "gap-large", "i": 1}, "horizon": 400, "trials": 3,
                "agents": [{"algorithm": "docb"}, {"algorithm": "tsbu"}]}"#,
        )
        .unwrap()
    }

    #[test]
    fn singleton_grid_matches_run() {
        let t = template();
        let rows = sweep(&t, "i", &[3.0], 1).unwrap();
        let aggs = run_experiment(&t.with_param("i", 3.0).unwrap(), 1).unwrap();
        assert_eq!(rows.len(), 2);
        for (row, agg) in rows.iter().zip(&aggs) {
            assert_eq!(row.agent, agg.agent);
            assert_eq!(row.regret_median, Some(agg.final_regret().unwrap().median));
            assert_eq!(row.unsafe_mean, Some(agg.final_unsafe().unwrap().mean));
        }
    }

    #[test]
    fn failing_point_does_not_stop_sweep() {
        // α = 0.01 leaves no safe arm.
        let rows = sweep(&template(), "alpha", &[0.01, 0.5], 1).unwrap();
        assert_eq!(rows.len(), 4);
        assert!(rows[0].error.is_some() && rows[1].error.is_some());
        assert!(rows[2].error.is_none() && rows[2].regret_mean.is_some());
    }

    #[test]
    fn bad_grid_is_rejected() {
        assert!(sweep(&template(), "i", &[], 1).is_err());
        assert!(sweep(&template(), "nope", &[1.0], 1).is_err());
    }
}
