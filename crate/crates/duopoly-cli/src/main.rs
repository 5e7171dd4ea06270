//! `duopoly`: batch front end for the two-brand diffusion toolkit.
//!
//! All commands are deterministic functions of (config, seed): rerunning
//! with identical inputs produces byte-identical artifacts. Log verbosity
//! is controlled by the `DUOPOLY_LOG` environment variable.

mod commands;
mod config;
mod output;
mod pipeline;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::ScenarioConfig;

#[derive(Parser)]
#[command(name = "duopoly", version, about = "Two-brand diffusion simulator and fitting toolkit")]
struct Cli {
    /// Scenario configuration (TOML); defaults are embedded
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Overrides the configured RNG seed
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Overrides the configured output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Overrides the configured ensemble replicate count
    #[arg(long, global = true)]
    replicates: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate the coupled Bass system and write the trajectory
    SimulateBass,
    /// Run the agent-based model (or an ensemble) and write per-tick shares
    SimulateAbm,
    /// Solve the within-brand equilibrium split
    Equilibrium,
    /// Equilibrium sweeps or cross-influence trajectory cases
    Sweep,
    /// Calibrate on monopoly runs and fit the four comparison experiments
    Fit,
    /// Rebuild a bundled figure/table artifact set
    Reproduce {
        /// One of: fig1, fig2, fig3, fig4, table-eq
        id: String,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("DUOPOLY_LOG", "warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    let mut cfg = match &cli.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.rng_seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    match &cli.command {
        Command::SimulateBass => commands::simulate_bass(&cfg),
        Command::SimulateAbm => commands::simulate_abm(&cfg, cli.replicates),
        Command::Equilibrium => commands::equilibrium(&cfg),
        Command::Sweep => commands::sweep(&cfg),
        Command::Fit => commands::fit(&cfg, cli.replicates),
        Command::Reproduce { id } => reproduce::run(&cfg, id, cli.replicates),
    }
}
