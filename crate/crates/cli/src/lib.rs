//! Command-line front end: `adjlab <subcommand> [options]`.
//!
//! Exit codes: 0 success, 1 runtime error, 2 usage or configuration error,
//! 3 when a run completed but recorded a falsification event.

pub mod commands;
pub mod config;
pub mod output;
pub mod verify;

use std::ffi::OsString;
use std::fmt;
use std::io;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::Events;
use crate::config::{Overrides, Resolved};
use crate::output::Artifacts;

pub const EXIT_OK: i32 = 0;
pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_FALSIFIED: i32 = 3;

#[derive(Debug)]
pub enum CliError {
    Usage(Vec<String>),
    Runtime(String),
}

impl CliError {
    pub fn runtime(e: impl fmt::Display) -> Self {
        CliError::Runtime(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_RUNTIME,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Runtime(e.to_string())
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(lines) => write!(f, "{}", lines.join("\n")),
            CliError::Runtime(s) => write!(f, "{s}"),
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "adjlab", version, about = "Experiments on compact adjoint Lie groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Common {
    /// JSON experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Cartan type such as A2 or G2.
    #[arg(long)]
    group: Option<String>,
    #[arg(long)]
    weight_bound: Option<usize>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, short = 'o')]
    output: Option<PathBuf>,
    #[arg(long)]
    no_svg: bool,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Dump normalized characters on a torus grid.
    ScanCharacters(Common),
    /// Empirical disk constant over the configured weights and grids.
    EstimateC(Common),
    /// Vanishing orbit sums, lattice walks and partial sums.
    Orbit(Common),
    /// Reachability and interiority of the identity in class powers.
    ClassPower(Common),
    /// Scaling of the BCH remainder and the product radius.
    Bch(Common),
    /// Arc constants, pigeonhole powers and the unitary estimates.
    ArcLemma(Common),
    /// Runs the invariant suite across every module.
    VerifyAll(Common),
}

type Runner = fn(&Resolved, &mut Artifacts) -> Result<Events, CliError>;

fn verify_runner(r: &Resolved, out: &mut Artifacts) -> Result<Events, CliError> {
    verify::verify_all(r.config.seed, out)
}

fn execute(common: &Common, runner: Runner) -> Result<Events, CliError> {
    let overrides = Overrides {
        group: common.group.clone(),
        weight_bound: common.weight_bound,
        grid: common.grid,
        seed: common.seed,
        output: common.output.clone(),
        no_svg: common.no_svg,
    };
    let resolved = config::load(common.config.as_deref(), &overrides).map_err(CliError::Usage)?;
    let mut out = Artifacts::new(&resolved.config.output)?;
    runner(&resolved, &mut out)
}

/// Parses `args` (including the program name) and runs the subcommand,
/// returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let (common, runner): (&Common, Runner) = match &cli.command {
        Command::ScanCharacters(c) => (c, commands::scan_characters),
        Command::EstimateC(c) => (c, commands::estimate_c),
        Command::Orbit(c) => (c, commands::orbit),
        Command::ClassPower(c) => (c, commands::class_power),
        Command::Bch(c) => (c, commands::bch),
        Command::ArcLemma(c) => (c, commands::arc_lemma),
        Command::VerifyAll(c) => (c, verify_runner),
    };
    match execute(common, runner) {
        Ok(events) if events.0.is_empty() => EXIT_OK,
        Ok(events) => {
            for e in &events.0 {
                eprintln!("falsified: {e}");
            }
            EXIT_FALSIFIED
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
