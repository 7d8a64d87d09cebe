use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::aggregate::{AggregateSeries, FinalValues, TrialFailure};
use super::sweep::SweepRow;
use crate::error::Result;

pub const CSV_HEADER: &str = "t,regret_mean,regret_median,regret_q1,regret_q3,regret_min,regret_max,unsafe_mean,unsafe_median,unsafe_q1,unsafe_q3,violation_mean";

pub const SWEEP_HEADER: &str = "param,value,agent,trials_completed,failed_trials,regret_median,regret_mean,unsafe_median,unsafe_mean,error";

/// File-name stem for an agent label: anything outside `[A-Za-z0-9._-]` becomes `_`.
pub fn file_stem(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || "._-".contains(c) { c } else { '_' })
        .collect()
}

#[derive(Serialize)]
struct Sidecar<'a> {
    agent: &'a str,
    trials_completed: usize,
    failed_trials: usize,
    failures: &'a [TrialFailure],
    mean_final_pulls: Vec<f64>,
    finals: &'a [FinalValues],
}

fn series_csv(agg: &AggregateSeries) -> String {
    let mut out = String::with_capacity(64 * (agg.t.len() + 1));
    out.push_str(CSV_HEADER);
    out.push('\n');
    for (i, t) in agg.t.iter().enumerate() {
        let (r, u, v) = (&agg.regret[i], &agg.unsafe_plays[i], &agg.violation[i]);
        writeln!(
            out,
            "{t},{},{},{},{},{},{},{},{},{},{},{}",
            r.mean, r.median, r.q1, r.q3, r.min, r.max, u.mean, u.median, u.q1, u.q3, v.mean
        )
        .unwrap();
    }
    out
}

/// Writes `<agent>.csv` and `<agent>.json` per agent into `dir`; returns the CSV paths.
pub fn write_experiment(dir: &Path, aggregates: &[AggregateSeries]) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut paths = Vec::with_capacity(aggregates.len());
    for agg in aggregates {
        let stem = file_stem(&agg.agent);
        let csv = dir.join(format!("{stem}.csv"));
        fs::write(&csv, series_csv(agg))?;
        let sidecar = Sidecar {
            agent: &agg.agent,
            trials_completed: agg.trials_completed,
            failed_trials: agg.failures.len(),
            failures: &agg.failures,
            mean_final_pulls: agg.mean_pulls(),
            finals: &agg.finals,
        };
        fs::write(dir.join(format!("{stem}.json")), serde_json::to_string_pretty(&sidecar)?)?;
        paths.push(csv);
    }
    Ok(paths)
}

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes `sweep.csv` into `dir` and returns its path.
pub fn write_sweep(dir: &Path, rows: &[SweepRow]) -> Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let mut out = String::from(SWEEP_HEADER);
    out.push('\n');
    for r in rows {
        let error = r.error.as_deref().unwrap_or("").replace(['"', ',', '\n'], " ");
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.param,
            r.value,
            r.agent,
            r.trials_completed,
            r.failed_trials,
            opt(r.regret_median),
            opt(r.regret_mean),
            opt(r.unsafe_median),
            opt(r.unsafe_mean),
            error
        )
        .unwrap();
    }
    let path = dir.join("sweep.csv");
    fs::write(&path, out)?;
    Ok(path)
}
