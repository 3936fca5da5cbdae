//! `lotto`: solve, verify, simulate and export General Lotto equilibria.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use commands::{CliError, Outcome};

#[derive(Debug, Parser)]
#[command(name = "lotto", version, about = "Equilibria of single-battlefield General Lotto games")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    ClosedForm,
    FictitiousPlay,
    Degenerate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    /// Strategy rows: atoms and segments per player.
    Csv,
    /// Full profile with game and solve metadata.
    Json,
    /// Plot table of `x, F_1, ..., F_n`.
    Table,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute an equilibrium and write it to a directory.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, value_enum)]
        method: Method,
        /// Grid resolution; defaults to the config's grid_k.
        #[arg(long)]
        grid_k: Option<usize>,
        /// Target exploitability for fictitious play.
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 20_000)]
        max_iters: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run every equilibrium check on a profile; exits 1 if any fails.
    Verify {
        /// Profile JSON, or strategy CSV.
        #[arg(long)]
        profile: PathBuf,
        /// Game config the profile is checked against.
        #[arg(long)]
        game: PathBuf,
        #[arg(long, default_value_t = 10_000)]
        k_audit: usize,
        /// ε-Nash tolerance; defaults to 1e-2 for grid profiles, 1e-3 otherwise.
        #[arg(long)]
        nash_tol: Option<f64>,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Play the profile repeatedly with a seeded generator.
    Simulate {
        #[arg(long)]
        profile: PathBuf,
        /// Game config, needed when the profile is a strategy CSV.
        #[arg(long)]
        game: Option<PathBuf>,
        #[arg(long)]
        samples: u64,
        #[arg(long)]
        seed: u64,
    },
    /// Convert a profile to another format on stdout.
    Export {
        #[arg(long)]
        profile: PathBuf,
        #[arg(long)]
        game: Option<PathBuf>,
        #[arg(long, value_enum)]
        format: Format,
    },
}

fn init_logging() -> Result<(), CliError> {
    let level = std::env::var("LOTTO_LOG_LEVEL").unwrap_or_else(|_| "info".into());
    if !matches!(level.as_str(), "error" | "info" | "debug") {
        return Err(CliError::Usage(format!("LOTTO_LOG_LEVEL must be error, info or debug, got {level:?}")));
    }
    env_logger::Builder::new().parse_filters(&level).format_timestamp(None).init();
    Ok(())
}

fn run(cli: Cli) -> Result<Outcome, CliError> {
    init_logging()?;
    match cli.command {
        Command::Solve { config, method, grid_k, eps, max_iters, out } => {
            commands::run_solve(&config, method, grid_k, eps, max_iters, &out)
        }
        Command::Verify { profile, game, k_audit, nash_tol, out } => {
            commands::run_verify(&profile, &game, k_audit, nash_tol, out.as_deref())
        }
        Command::Simulate { profile, game, samples, seed } => {
            commands::run_simulate(&profile, game.as_deref(), samples, seed)
        }
        Command::Export { profile, game, format } => commands::run_export(&profile, game.as_deref(), format),
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::VerificationFailed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
