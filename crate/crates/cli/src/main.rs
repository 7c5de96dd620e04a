//! `acsplit`: experiment driver for the splitting schemes, thresholding and radial obstacle steps.

mod commands;
mod config;
mod error;
mod output;

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::Context;
use config::{Config, Key};
use error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "acsplit",
    version,
    about = "Allen-Cahn splitting experiments: CSV and SVG outputs"
)]
struct Cli {
    /// Config file of `key=value` lines; `#` starts a comment.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, value_name = "DIR", default_value = "out")]
    out: PathBuf,
    /// Worker threads for sweeps; defaults to one per core.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    /// Seed for random initial data.
    #[arg(long, global = true, value_name = "N", default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Settings {
    /// Settings overriding the config file.
    #[arg(value_name = "KEY=VALUE")]
    pairs: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the splitting scheme and write the energy trace, final field and energy plot.
    Simulate(Settings),
    /// Count iterations until the energy falls below a level, over lists of eps and tau.
    SweepTau(Settings),
    /// Run the thresholding scheme and track the interface radius and its energy.
    Mbo(Settings),
    /// Radial double-obstacle step for one eps, or the scaling study for a list.
    Obstacle(Settings),
    /// Run the invariant checks and print one line per check.
    Verify(Settings),
    /// Tabulate optimal profiles and potentials.
    Profile(Settings),
}

type Handler = fn(Config, &Context) -> Result<(), CliError>;

impl Command {
    fn parts(self) -> (&'static str, &'static [Key], Handler, Vec<String>) {
        use commands::*;
        match self {
            Command::Simulate(s) => ("simulate", simulate::KEYS, simulate::execute, s.pairs),
            Command::SweepTau(s) => ("sweep-tau", sweep::KEYS, sweep::execute, s.pairs),
            Command::Mbo(s) => ("mbo", mbo::KEYS, mbo::execute, s.pairs),
            Command::Obstacle(s) => ("obstacle", obstacle::KEYS, obstacle::execute, s.pairs),
            Command::Verify(s) => ("verify", verify::KEYS, verify::execute, s.pairs),
            Command::Profile(s) => ("profile", profile::KEYS, profile::execute, s.pairs),
        }
    }
}

fn dispatch(cli: Cli) -> Result<(), CliError> {
    if cli.threads == Some(0) {
        return Err(CliError::Usage("--threads must be positive".into()));
    }
    let file = cli
        .config
        .as_ref()
        .map(|p| {
            fs::read_to_string(p)
                .map_err(|e| CliError::Usage(format!("reading {}: {e}", p.display())))
        })
        .transpose()?;
    let (name, keys, handler, pairs) = cli.command.parts();
    let cfg = Config::resolve(name, keys, file.as_deref(), &pairs)?;
    fs::create_dir_all(&cli.out)?;
    let ctx = Context {
        out: cli.out,
        seed: cli.seed,
        threads: cli.threads,
    };
    handler(cfg, &ctx)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("acsplit: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
