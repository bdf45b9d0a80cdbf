use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand};

use rlmc_cli::config::{Experiment, ExperimentConfig};
use rlmc_cli::report::summary_line;

/// Experiment runner for the randomized-midpoint Langevin sampler.
///
/// Each subcommand ships reference defaults; override them with a flat
/// `key = value` config file and/or the common flags. Exit code 0 means
/// every pass flag of the run was true.
#[derive(Parser)]
#[command(name = "rlmc", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Flat key = value config file overlaying the defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Root seed of the run.
    #[arg(long)]
    seed: Option<u64>,
    /// Records CSV path (the summary lands next to it).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; 0 or omitted = all cores.
    #[arg(long)]
    workers: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form stationary-bias sweep over a step-size grid.
    BiasSweep(CommonArgs),
    /// Wasserstein contraction of two fixed-step ensembles.
    Ergodicity(CommonArgs),
    /// Normalized second-moment bias of the decreasing-step chain.
    DecreasingRate(CommonArgs),
    /// Strong and weak one-step discretization orders.
    OneStepOrder(CommonArgs),
    /// One-step Lyapunov drift inequality, exact and Monte Carlo.
    DriftCheck(CommonArgs),
    /// Step-schedule diagnostics (regularity constant, auxiliary sequence).
    ScheduleDiag(CommonArgs),
    /// Transition density quadrature against simulation.
    DensityCheck(CommonArgs),
    /// Decreasing-step second moments against the recursion oracle.
    MomentCheck(CommonArgs),
}

impl Command {
    fn experiment(&self) -> Experiment {
        match self {
            Command::BiasSweep(_) => Experiment::BiasSweep,
            Command::Ergodicity(_) => Experiment::Ergodicity,
            Command::DecreasingRate(_) => Experiment::DecreasingRate,
            Command::OneStepOrder(_) => Experiment::OneStepOrder,
            Command::DriftCheck(_) => Experiment::DriftCheck,
            Command::ScheduleDiag(_) => Experiment::ScheduleDiag,
            Command::DensityCheck(_) => Experiment::DensityCheck,
            Command::MomentCheck(_) => Experiment::MomentCheck,
        }
    }

    fn common(&self) -> &CommonArgs {
        match self {
            Command::BiasSweep(c)
            | Command::Ergodicity(c)
            | Command::DecreasingRate(c)
            | Command::OneStepOrder(c)
            | Command::DriftCheck(c)
            | Command::ScheduleDiag(c)
            | Command::DensityCheck(c)
            | Command::MomentCheck(c) => c,
        }
    }
}

fn run() -> Result<bool> {
    let cli = Cli::parse();
    let mut cfg = ExperimentConfig::defaults(cli.command.experiment());
    let common = cli.command.common();
    if let Some(path) = &common.config {
        cfg.apply_file(path)?;
    }
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out = out.clone();
    }
    if let Some(workers) = common.workers {
        cfg.workers = workers;
    }

    let outcome = rlmc_cli::execute(&cfg)?;
    for row in &outcome.summary {
        println!("{}", summary_line(row));
    }
    println!(
        "records: {} | summary: {}",
        outcome.records_path.display(),
        outcome.summary_path.display()
    );
    Ok(outcome.all_pass)
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
