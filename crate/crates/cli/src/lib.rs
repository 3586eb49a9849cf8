//! Command-line front end for the scouting game: closed forms, simulation,
//! equilibrium solving, parameter sweeps and a reproduction table.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use scouting_core::analytic::theory_warnings;
use scouting_core::{BeliefMode, Variant};

use crate::config::{parse_values, Format, RunConfig};
use crate::error::CliError;
use crate::output::Table;

#[derive(Debug, Parser)]
#[command(name = "scouting", version, about = "Matching pennies with scouting and decoys")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub args: RunArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Closed-form equilibrium quantities.
    Analytic,
    /// Monte Carlo estimates next to the closed forms.
    Simulate,
    /// Numeric equilibrium from the enumerated game.
    Solve,
    /// Closed forms (and optionally simulation) over a parameter grid.
    Sweep,
    /// Every stated value with its closed form and simulation.
    ReportPaper,
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    /// TOML file with any of the options below; flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true)]
    pub episodes: Option<u64>,
    #[arg(long, global = true)]
    pub max_iterations: Option<u64>,
    /// pitched-battle, initiative or withdraw.
    #[arg(long, global = true)]
    pub variant: Option<Variant>,
    /// Player 1's scouting precision.
    #[arg(long, global = true)]
    pub p: Option<f64>,
    /// Player 2's scouting precision.
    #[arg(long, global = true)]
    pub q: Option<f64>,
    /// Player 1's precision when Player 2 plans B.
    #[arg(long = "p-tilde-b", global = true)]
    pub p_tilde_b: Option<f64>,
    /// Chance that a player gets to field a decoy.
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true)]
    pub xi1: Option<f64>,
    #[arg(long, global = true)]
    pub xi2: Option<f64>,
    /// rational or naive.
    #[arg(long, global = true)]
    pub beliefs1: Option<BeliefMode>,
    #[arg(long, global = true)]
    pub beliefs2: Option<BeliefMode>,
    /// csv or json.
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// Write to a file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub horizons: Option<Vec<u32>>,
    /// `a,b,c` or `start:stop:step`.
    #[arg(long = "p-values", global = true, value_parser = value_list)]
    pub p_values: Option<ValueList>,
    #[arg(long = "q-values", global = true, value_parser = value_list)]
    pub q_values: Option<ValueList>,
    #[arg(long = "delta-values", global = true, value_parser = value_list)]
    pub delta_values: Option<ValueList>,
    #[arg(long, global = true, value_delimiter = ',')]
    pub variants: Option<Vec<Variant>>,
    /// Sweep q = p only.
    #[arg(long, global = true)]
    pub diagonal: bool,
    /// Worker threads for simulation. Results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValueList(pub Vec<f64>);

fn value_list(s: &str) -> Result<ValueList, String> {
    parse_values(s).map(ValueList)
}

impl RunArgs {
    pub fn to_config(&self) -> RunConfig {
        RunConfig {
            variant: self.variant,
            p: self.p,
            q: self.q,
            p_tilde_b: self.p_tilde_b,
            delta: self.delta,
            xi1: self.xi1,
            xi2: self.xi2,
            beliefs1: self.beliefs1,
            beliefs2: self.beliefs2,
            episodes: self.episodes,
            max_iterations: self.max_iterations,
            seed: self.seed,
            format: self.format,
            out: self.out.clone(),
            horizons: self.horizons.clone(),
            p_values: self.p_values.clone().map(|v| v.0),
            q_values: self.q_values.clone().map(|v| v.0),
            delta_values: self.delta_values.clone().map(|v| v.0),
            variants: self.variants.clone(),
            diagonal: self.diagonal.then_some(true),
        }
    }

    /// File settings overlaid with flags.
    pub fn resolve(&self) -> Result<RunConfig, CliError> {
        let base = match &self.config {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        Ok(base.overlay(self.to_config()))
    }
}

pub fn execute(command: Command, cfg: &RunConfig) -> Result<Table, CliError> {
    match command {
        Command::Analytic => commands::analytic(cfg),
        Command::Simulate => commands::simulate(cfg),
        Command::Solve => commands::solve(cfg),
        Command::Sweep => commands::sweep(cfg),
        Command::ReportPaper => commands::report_paper(cfg),
    }
}

pub fn run(cli: &Cli) -> Result<(), CliError> {
    let cfg = cli.args.resolve()?;
    if let Some(threads) = cli.args.threads {
        if threads == 0 {
            return Err(CliError::field("threads", "must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::field("threads", &e.to_string()))?;
    }
    if matches!(cli.command, Command::Analytic | Command::Simulate | Command::Solve) {
        if let Ok(params) = cfg.params() {
            for w in theory_warnings(&params) {
                eprintln!("warning: {w}");
            }
        }
    }
    let table = execute(cli.command, &cfg)?;
    match &cfg.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            table.write(cfg.format(), &mut w)?;
            w.flush()?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = stdout.lock();
            table.write(cfg.format(), &mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}
