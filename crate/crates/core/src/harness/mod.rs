//! Seeded multi-trial execution, aggregation and persistence.

mod aggregate;
mod config;
mod output;
mod sweep;
mod trial;

pub use aggregate::{aggregate, AggregateSeries, FinalValues, Summary, TrialFailure};
pub use config::{ExperimentConfig, InstanceConfig, Preset, DEFAULT_RECORD_STRIDE, SWEEP_PARAMS};
pub use output::{file_stem, write_experiment, write_sweep, CSV_HEADER, SWEEP_HEADER};
pub use sweep::{sweep, SweepRow};
pub use trial::{run_trial, run_trial_on, trial_seed, TrialSeries};

use rayon::prelude::*;

use crate::env::ground_truth;
use crate::error::{Error, Result};

/// Runs every (agent, trial) pair on up to `workers` threads and aggregates per agent.
///
/// Failed trials are excluded from the statistics and listed in `failures`.
/// The result does not depend on `workers` or on scheduling.
pub fn run_experiment(config: &ExperimentConfig, workers: usize) -> Result<Vec<AggregateSeries>> {
    let instance = config.validate()?;
    let truth = ground_truth(&instance)?;
    let jobs: Vec<(usize, u64)> = (0..config.agents.len())
        .flat_map(|a| (0..config.trials).map(move |t| (a, t)))
        .collect();
    let run = |&(a, t): &(usize, u64)| run_trial_on(&instance, &truth, config, &config.agents[a], t);
    let results: Vec<Result<TrialSeries>> = if workers <= 1 {
        jobs.iter().map(run).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
        pool.install(|| jobs.par_iter().map(run).collect())
    };

    let mut per_agent: Vec<(Vec<TrialSeries>, Vec<TrialFailure>)> =
        config.agents.iter().map(|_| (Vec::new(), Vec::new())).collect();
    for (&(a, t), result) in jobs.iter().zip(results) {
        match result {
            Ok(series) => per_agent[a].0.push(series),
            Err(e) => per_agent[a].1.push(TrialFailure { trial: t, message: e.to_string() }),
        }
    }
    config
        .agents
        .iter()
        .zip(per_agent)
        .map(|(spec, (series, failures))| aggregate(&spec.label(), &series, failures))
        .collect()
}

/// Worker count: explicit value, else `SAFE_BANDITS_WORKERS`, else the available parallelism.
pub fn resolve_workers(flag: Option<usize>) -> usize {
    flag.or_else(|| {
        std::env::var(WORKERS_ENV)
            .ok()
            .and_then(|v| v.trim().parse().ok())
    })
    .filter(|&n| n > 0)
    .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
}

pub const WORKERS_ENV: &str = "SAFE_BANDITS_WORKERS";
