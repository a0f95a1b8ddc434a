//! `radhydro <command> --config <path> --out <dir> [--seed <u64>]`
//!
//! Exit status: 0 on success, 1 on invalid input, 2 on numerical failure
//! (aborted run or a failed check).

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use commands::Verdict;
use config::Config;
use error::CliError;
use output::{sha256_hex, Manifest, OutputDir};

#[derive(Parser)]
#[command(name = "radhydro", version, about = "Numerical laboratory for diffusion-approximation radiation hydrodynamics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args)]
struct Common {
    /// JSON configuration document.
    #[arg(long)]
    config: PathBuf,
    /// Output directory, created if missing.
    #[arg(long)]
    out: PathBuf,
    /// Overrides the initial-data seed of the configuration.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Eigenvalues and Hurwitz determinants of the linearized symbol.
    Symbol(Common),
    /// Whole-space semigroup norms for a Gaussian datum.
    SemigroupDecay(Common),
    /// Nonlinear pseudo-spectral run on the periodic box.
    Simulate(Common),
    /// Dyadic shell energies and Besov norms of the initial data.
    Lp(Common),
    /// Energy functionals before and after a run.
    Energy(Common),
    /// Decay-rate suite with fitted slopes.
    VerifyRates(Common),
}

type Runner = fn(&Config, &mut OutputDir) -> Result<Verdict, CliError>;

impl Command {
    fn parts(&self) -> (&'static str, &Common, Runner) {
        match self {
            Command::Symbol(c) => ("symbol", c, commands::symbol),
            Command::SemigroupDecay(c) => ("semigroup-decay", c, commands::semigroup_decay),
            Command::Simulate(c) => ("simulate", c, commands::simulate),
            Command::Lp(c) => ("lp", c, commands::lp),
            Command::Energy(c) => ("energy", c, commands::energy),
            Command::VerifyRates(c) => ("verify-rates", c, commands::verify_rates_cmd),
        }
    }
}

fn execute(name: &str, args: &Common, runner: Runner) -> Result<(), CliError> {
    let started = Instant::now();
    let config = Config::load(&args.config)?;
    let config = config.with_seed(args.seed);
    let resolved = serde_json::to_vec_pretty(&config)?;
    let mut out = OutputDir::new(&args.out);
    let result = runner(&config, &mut out);
    if let Err(CliError::Validation(_)) = result {
        return result.map(|_| ());
    }
    let status = match &result {
        Ok(Verdict::Pass) => "ok",
        Ok(Verdict::Fail(_)) => "failed",
        Err(_) => "error",
    };
    out.json("config.json", &config)?;
    let outputs = out.files().to_vec();
    out.json(
        "manifest.json",
        &Manifest {
            command: name,
            version: env!("CARGO_PKG_VERSION"),
            config_sha256: sha256_hex(&resolved),
            wall_time_seconds: started.elapsed().as_secs_f64(),
            status,
            outputs: &outputs,
        },
    )?;
    println!("{name}: {status}; wrote {} files to {}", outputs.len() + 1, args.out.display());
    match result? {
        Verdict::Pass => Ok(()),
        Verdict::Fail(reason) => Err(CliError::Numerical(reason)),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let (name, args, runner) = cli.command.parts();
    match execute(name, args, runner) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
