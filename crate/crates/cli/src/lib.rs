//! Command-line front end: argument parsing, configuration and the
//! subcommand drivers.

pub mod commands;
pub mod config;
pub mod error;
pub mod ingest;
pub mod svg;

use std::ffi::OsString;
use std::path::PathBuf;

use anonytope_core::categorical::Strategy;
use anonytope_core::Objective;
use clap::{Parser, Subcommand};

use crate::commands::Outcome;
use crate::config::{Format, GridSpec, RunConfig};
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(
    name = "anonytope",
    version,
    about = "k-anonymity regimes from persistent homology"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regimes for every k, the weighted barcode and its diagram.
    Sweep(Flags),
    /// Decide k-anonymity at a single radius.
    Check(Flags),
    /// Write the generalized table for one k.
    Anonymize(Flags),
    /// Persistence barcode only.
    Barcode(Flags),
    /// Search the generalization lattice of categorical attributes.
    LatticeSweep(Flags),
}

#[derive(Debug, Clone, Default, clap::Args)]
pub struct Flags {
    /// TOML file with the same keys as these flags; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Quasi-identifier columns, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub quasi: Vec<String>,
    /// Identifier columns, always dropped from generalized output.
    #[arg(long, value_delimiter = ',')]
    pub identifiers: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub sensitive: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    #[arg(long)]
    pub eps: Option<f64>,
    /// Fixed radii, either `a,b,c` or `start:step:stop`.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long)]
    pub dim_cap: Option<usize>,
    /// `max_classes` (default) or `smallest_eps`.
    #[arg(long)]
    pub objective: Option<Objective>,
    /// `lower_then_upper` (default) or `exhaustive`.
    #[arg(long)]
    pub strategy: Option<Strategy>,
    /// TOML file of generalization trees.
    #[arg(long)]
    pub trees: Option<PathBuf>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Any of json, csv, svg, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub format: Vec<Format>,
    /// Keep sensitive columns in the generalized table.
    #[arg(long)]
    pub keep_sensitive: bool,
}

impl Flags {
    pub fn resolve(&self) -> CliResult<RunConfig> {
        let base = match &self.config {
            Some(path) => RunConfig::from_file(path)?,
            None => RunConfig::default(),
        };
        let flags = RunConfig {
            input: self.input.clone(),
            quasi: self.quasi.clone(),
            identifiers: self.identifiers.clone(),
            sensitive: self.sensitive.clone(),
            k: self.k.clone(),
            mode: None,
            eps: self.eps,
            grid: self.grid.as_deref().map(GridSpec::parse).transpose()?,
            dim_cap: self.dim_cap,
            objective: self.objective,
            strategy: self.strategy,
            trees: self.trees.clone(),
            out: self.out.clone(),
            format: self.format.clone(),
            keep_sensitive: self.keep_sensitive.then_some(true),
        };
        Ok(base.overlay(flags))
    }
}

pub fn execute(command: &Command) -> CliResult<Outcome> {
    use crate::config::Mode;
    let (flags, mode) = match command {
        Command::LatticeSweep(f) => (f, Mode::Categorical),
        Command::Sweep(f) | Command::Check(f) | Command::Anonymize(f) | Command::Barcode(f) => {
            (f, Mode::Numeric)
        }
    };
    let config = flags.resolve()?;
    if config.mode.is_some_and(|m| m != mode) {
        return Err(error::CliError::Config(format!(
            "mode {:?} does not match this subcommand",
            config.mode.unwrap_or(mode)
        )));
    }
    match command {
        Command::Sweep(_) => commands::sweep(&config),
        Command::Check(_) => commands::check(&config),
        Command::Anonymize(_) => commands::anonymize(&config),
        Command::Barcode(_) => commands::barcode(&config),
        Command::LatticeSweep(_) => commands::lattice_sweep(&config),
    }
}

/// Caps the worker pool from `ANONYTOPE_THREADS`; ignored when unset.
pub fn configure_threads() -> Result<(), String> {
    let Ok(value) = std::env::var("ANONYTOPE_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| format!("ANONYTOPE_THREADS must be a positive integer, got `{value}`"))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())
}

/// Parses `args`, runs the command and prints its output. Returns the exit
/// status: 0 on success, 2 when k cannot be met, 1 on input errors.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    if let Err(e) = configure_threads() {
        eprintln!("warning: {e}");
    }
    match execute(&cli.command) {
        Ok(outcome) => {
            for line in &outcome.stdout {
                println!("{line}");
            }
            for line in &outcome.stderr {
                eprintln!("{line}");
            }
            for file in &outcome.files {
                println!("wrote {}", file.display());
            }
            outcome.code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
