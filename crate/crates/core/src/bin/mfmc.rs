use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use mfmc::harness::{
    cmd_allocate, cmd_estimate, cmd_experiment, cmd_pilot, cmd_select, write_experiment_outputs,
    write_json, ExperimentConfig, StatsSource,
};
use mfmc::{EnsembleStatistics, Method};
use serde::Serialize;

#[derive(Parser)]
#[command(name = "mfmc", version, about = "Budget-preserving multifidelity Monte Carlo")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate ensemble statistics from a pilot sample and write them as JSON.
    Pilot {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        stats_source: Option<StatsSource>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Choose the model subset with the smallest predicted variance.
    Select {
        #[arg(long)]
        stats: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integer sample counts for one budget.
    Allocate {
        #[arg(long)]
        stats: PathBuf,
        /// Absolute budget in cost units.
        #[arg(long, conflicts_with = "budget_over_w1", required_unless_present = "budget_over_w1")]
        budget: Option<f64>,
        /// Budget as a multiple of the high-fidelity cost.
        #[arg(long)]
        budget_over_w1: Option<f64>,
        #[arg(long, default_value = "modified")]
        method: Method,
        /// 1-based model indices, high-fidelity first, e.g. `1,2,5`.
        #[arg(long, value_delimiter = ',', conflicts_with = "select")]
        models: Option<Vec<usize>>,
        /// Run model selection first and allocate over the selected subset.
        #[arg(long)]
        select: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Pilot, selection, allocation and a single estimate.
    Estimate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        budget_over_w1: f64,
        #[arg(long, default_value = "modified")]
        method: Method,
        #[arg(long, value_enum)]
        stats_source: Option<StatsSource>,
    },
    /// Full comparison over the configured budgets and methods.
    Experiment {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        stats_source: Option<StatsSource>,
        /// Also write every per-run estimate to `runs.csv`.
        #[arg(long)]
        emit_plot_data: bool,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

fn emit<T: Serialize>(value: &T, out: Option<PathBuf>) -> mfmc::Result<()> {
    match out {
        Some(path) => write_json(value, &path),
        None => {
            println!("{}", serde_json::to_string_pretty(value)?);
            Ok(())
        }
    }
}

fn load_config(path: &Path, source: Option<StatsSource>) -> mfmc::Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(path)?;
    if let Some(s) = source {
        cfg.stats_source = s;
        cfg.validate()?;
    }
    Ok(cfg)
}

fn read_stats(path: &PathBuf) -> mfmc::Result<EnsembleStatistics> {
    let stats: EnsembleStatistics = serde_json::from_str(&fs::read_to_string(path)?)?;
    stats.validate()?;
    Ok(stats)
}

fn run(cli: Cli) -> mfmc::Result<bool> {
    match cli.command {
        Command::Pilot { config, stats_source, out } => {
            let cfg = load_config(&config, stats_source)?;
            emit(&cmd_pilot(&cfg)?, out)?;
        }
        Command::Select { stats, out } => {
            emit(&cmd_select(&read_stats(&stats)?)?, out)?;
        }
        Command::Allocate { stats, budget, budget_over_w1, method, models, select, out } => {
            let mut stats = read_stats(&stats)?;
            if let Some(one_based) = models {
                let idx: Vec<usize> = one_based.iter().map(|&i| i.checked_sub(1)).collect::<Option<_>>().ok_or_else(|| {
                    mfmc::Error::InvalidInput("model indices are 1-based".into())
                })?;
                stats = stats.subset(&idx)?;
            } else if select {
                let sel = cmd_select(&stats)?;
                stats = stats.subset(&sel.selected_indices)?;
            }
            let p = budget.unwrap_or_else(|| budget_over_w1.expect("enforced by clap") * stats.costs[0]);
            emit(&cmd_allocate(&stats, p, method)?, out)?;
        }
        Command::Estimate { config, budget_over_w1, method, stats_source } => {
            let cfg = load_config(&config, stats_source)?;
            emit(&cmd_estimate(&cfg, budget_over_w1, method)?, None)?;
        }
        Command::Experiment { config, stats_source, emit_plot_data, output_dir } => {
            let cfg = load_config(&config, stats_source)?;
            let outcome = cmd_experiment(&cfg)?;
            let dir = output_dir.unwrap_or_else(|| cfg.output_dir());
            let paths = write_experiment_outputs(&outcome, &dir, emit_plot_data)?;
            print!("{}", outcome.table.render_text());
            for p in paths {
                eprintln!("wrote {}", p.display());
            }
            if !outcome.all_complete() {
                eprintln!("some rows did not complete");
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
