//! `metriq`: validate metrics, run the postselected simulations and the
//! tomographic verification game from JSON configs.
//!
//! Exit codes: 0 success or accept, 1 reject, 2 domain error,
//! 3 I/O or parse error, 64 usage error.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

pub const EXIT_REJECT: u8 = 1;
pub const EXIT_DOMAIN: u8 = 2;
pub const EXIT_IO: u8 = 3;
pub const EXIT_USAGE: u8 = 64;

#[derive(Debug, Parser)]
#[command(name = "metriq", version, about = "Inner-product-change channels, PT-symmetric simulation and verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Operations on metric operators.
    #[command(subcommand)]
    Metric(MetricCommand),
    /// Shot-based simulation of the postselected procedures.
    #[command(subcommand)]
    Simulate(SimulateCommand),
    /// Run the prover against the tomographic verifier.
    Verify(CommonArgs),
}

#[derive(Debug, Subcommand)]
enum MetricCommand {
    /// Check that a matrix is a metric and report its spectrum.
    Validate(CommonArgs),
}

#[derive(Debug, Subcommand)]
enum SimulateCommand {
    /// Postselected G_eta on a qubit state.
    #[command(name = "g-eta")]
    GEta(CommonArgs),
    /// PT-symmetric evolution on a qutrit.
    Pt(CommonArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON config file.
    #[arg(long, value_name = "PATH")]
    pub config: PathBuf,
    /// RNG seed; overrides the config's "seed".
    #[arg(long, value_name = "U64")]
    pub seed: Option<u64>,
    /// Kept copies per input; overrides the config's "shots" [default: 100000].
    #[arg(long, value_name = "N")]
    pub shots: Option<u64>,
    /// Output file; standard output if absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Output format [default: csv for simulate, json otherwise].
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

/// Everything that ends a run early, mapped onto an exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Domain(metriq::Error),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Domain(_) => EXIT_DOMAIN,
            CliError::Io(_) => EXIT_IO,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Domain(e) => write!(f, "error: {e}"),
            CliError::Io(m) => write!(f, "error: {m}"),
        }
    }
}

impl From<metriq::Error> for CliError {
    fn from(e: metriq::Error) -> Self {
        CliError::Domain(e)
    }
}

fn init_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("METRIQ_THREADS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Usage(format!("METRIQ_THREADS must be a nonnegative integer, got {raw:?}")))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Io(format!("cannot start thread pool: {e}")))?;
    }
    Ok(())
}

fn dispatch(cli: Cli) -> Result<u8, CliError> {
    init_threads()?;
    match cli.command {
        Command::Metric(MetricCommand::Validate(args)) => run::metric_validate(&args),
        Command::Simulate(SimulateCommand::GEta(args)) => run::simulate_g_eta(&args),
        Command::Simulate(SimulateCommand::Pt(args)) => run::simulate_pt(&args),
        Command::Verify(args) => run::verify(&args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
