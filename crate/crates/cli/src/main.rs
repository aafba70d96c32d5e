//! `specfact`: factorize 2×2 matrix densities, verify stored factors, and
//! generate test instances.

mod commands;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(name = "specfact", version, about = "Spectral factorization of 2x2 matrix densities on the unit circle")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute an approximate spectral factor and its error bound.
    Factorize(FactorizeArgs),
    /// Re-check a stored factor against a density.
    Verify(VerifyArgs),
    /// Generate a random density with a known exact factor.
    Gen(GenArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args)]
#[command(group(clap::ArgGroup::new("order").required(true).args(["n", "target"])))]
pub struct FactorizeArgs {
    /// Density file (trig-poly-2x2 JSON).
    pub input: PathBuf,
    /// Truncation order.
    #[arg(long)]
    pub n: Option<usize>,
    /// Smallest order whose error bound is below this value.
    #[arg(long)]
    pub target: Option<f64>,
    /// Grid size, a power of two.
    #[arg(long, env = "SPECFACT_GRID", default_value_t = 4096)]
    pub grid: usize,
    /// Unitarity tolerance of the completion.
    #[arg(long, default_value_t = 1e-9)]
    pub tol: f64,
    /// Number of negative coefficients of phi kept.
    #[arg(long)]
    pub phi_band: Option<usize>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args)]
pub struct VerifyArgs {
    pub density: PathBuf,
    pub factor: PathBuf,
    /// Grid used when the factor file records none.
    #[arg(long, env = "SPECFACT_GRID", default_value_t = 4096)]
    pub grid: usize,
}

#[derive(Args)]
pub struct GenArgs {
    #[arg(long)]
    pub degree: usize,
    #[arg(long)]
    pub seed: u64,
    /// Density output path.
    #[arg(long)]
    pub out: PathBuf,
    /// Exact-factor output path; defaults to the density path with extension `exact.json`.
    #[arg(long)]
    pub factor_out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Factorize(args) => commands::factorize(&args),
        Command::Verify(args) => verify::run(&args),
        Command::Gen(args) => commands::gen(&args),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            println!("{}", e.to_json());
            ExitCode::from(e.exit_code)
        }
    }
}
