use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use safe_bandits::agents::Algorithm;
use safe_bandits::bounds::bound_report;
use safe_bandits::env::ground_truth;
use safe_bandits::harness::{
    resolve_workers, run_experiment, sweep, write_experiment, write_sweep, ExperimentConfig,
};
use safe_bandits::Error;

#[derive(Parser)]
#[command(name = "safe-bandits", version, about = "Safety-constrained bandit simulations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every agent of a config and write one CSV and sidecar JSON per agent.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides SAFE_BANDITS_WORKERS.
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Rerun a config over a grid of one parameter and write sweep.csv.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        param: String,
        /// Comma-separated values, e.g. `2,4,6`.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        values: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Print the instance's bound report as JSON.
    Bounds {
        #[arg(long)]
        config: PathBuf,
    },
    /// List the available algorithms.
    ListAlgorithms,
}

enum Failure {
    Config(String),
    Runtime(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Json(_) => Failure::Config(e.to_string()),
            other => Failure::Runtime(other.to_string()),
        }
    }
}

fn execute(cmd: Command) -> Result<(), Failure> {
    match cmd {
        Command::Run { config, out, workers } => {
            let config = ExperimentConfig::load(&config)?;
            let aggregates = run_experiment(&config, resolve_workers(workers))?;
            let paths = write_experiment(&out, &aggregates)?;
            let mut dead = Vec::new();
            for (agg, path) in aggregates.iter().zip(&paths) {
                for f in &agg.failures {
                    eprintln!("warning: {}", f.message);
                }
                if agg.trials_completed == 0 {
                    dead.push(agg.agent.clone());
                }
                eprintln!(
                    "{}: {} trials completed, {} failed -> {}",
                    agg.agent,
                    agg.trials_completed,
                    agg.failures.len(),
                    path.display()
                );
            }
            if !dead.is_empty() {
                return Err(Failure::Runtime(format!("no trial completed for {}", dead.join(", "))));
            }
            Ok(())
        }
        Command::Sweep { config, param, values, out, workers } => {
            let config = ExperimentConfig::load(&config)?;
            let rows = sweep(&config, &param, &values, resolve_workers(workers))?;
            let path = write_sweep(&out, &rows)?;
            for r in rows.iter().filter(|r| r.error.is_some()) {
                eprintln!(
                    "warning: {}={} {}: {}",
                    r.param,
                    r.value,
                    r.agent,
                    r.error.as_deref().unwrap_or_default()
                );
            }
            eprintln!("{} rows -> {}", rows.len(), path.display());
            if rows.iter().all(|r| r.error.is_some()) {
                return Err(Failure::Runtime("every grid point failed".into()));
            }
            Ok(())
        }
        Command::Bounds { config } => {
            let config = ExperimentConfig::load(&config)?;
            let instance = config.validate()?;
            let truth = ground_truth(&instance)?;
            let report = bound_report(&truth, &instance, config.horizon as f64)?;
            println!("{}", serde_json::to_string_pretty(&report).map_err(Error::from)?);
            Ok(())
        }
        Command::ListAlgorithms => {
            for a in Algorithm::ALL {
                println!("{:<16}{}", a.name(), a.description());
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match execute(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
