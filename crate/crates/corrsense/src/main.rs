use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use corrsense::{run_experiment, AppError, Experiment, ExperimentConfig};

#[derive(Parser)]
#[command(
    name = "corrsense",
    version,
    about = "Correlation-aware node selection experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment (or `all`) and write CSV/JSON artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// table1, fig1, fig2, fig3, table2, fig4 or all.
        #[arg(long)]
        experiment: Experiment,
        #[arg(long)]
        out: PathBuf,
        /// Deployment seed; beats CORRSENSE_SEED and the config.
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn env_seed() -> Result<Option<u64>, AppError> {
    match std::env::var("CORRSENSE_SEED") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| AppError::InvalidConfig(format!("CORRSENSE_SEED `{v}` is not a u64"))),
        Err(_) => Ok(None),
    }
}

fn run(cli: Cli) -> Result<(), AppError> {
    let Command::Run {
        config,
        experiment,
        out,
        seed,
    } = cli.command;
    let mut cfg = ExperimentConfig::load(&config)?;
    if let Some(s) = seed
        .map(Ok)
        .or_else(|| env_seed().transpose())
        .transpose()?
    {
        cfg.seed = s;
    }
    cfg.experiment = experiment;
    cfg.output_dir = out.clone();
    let summary = run_experiment(&cfg, &out)?;
    println!(
        "{}: {} clusters, {} of {} nodes selected, artifacts in {}",
        experiment,
        summary.cluster_count,
        summary.total_selected,
        summary.nodes_deployed,
        out.display()
    );
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
