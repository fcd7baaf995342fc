//! `asforge` — construct and check Artin-Schreier fibre products of curves
//! with many rational points.
//!
//! Exit codes: 0 success; 2 bad input (config, expressions, budget); 3 a
//! violated internal cross-check (count mismatch, oracle disagreement,
//! inconsistent zeta fit).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use asforge_core::error::Error;

use asforge_cli::commands::{self, SearchOverrides};
use asforge_cli::report::{self, Format};
use asforge_cli::config;

#[derive(Parser)]
#[command(
    name = "asforge",
    version,
    about = "Artin-Schreier covers and fibre products over small finite fields"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Path to the job config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Override the default series precision of the curve model.
    #[arg(long)]
    precision: Option<i64>,
    /// Worker threads for candidate evaluation (default: one per core).
    #[arg(long)]
    threads: Option<usize>,
    /// Output format: table, csv or json.
    #[arg(long, default_value = "table")]
    format: String,
    /// Write the report to this path instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Solve the trace conditions; print the solution-space bases and dims.
    Solve {
        #[command(flatten)]
        common: Common,
    },
    /// Analyze the fibre product of an explicit family of functions.
    Analyze {
        #[command(flatten)]
        common: Common,
        /// Comma-separated basis expressions, e.g. "x*y, x^2 + x".
        #[arg(long, value_delimiter = ',', required = true)]
        basis: Vec<String>,
        /// Analyze families outside the solution space of the trace system.
        #[arg(long)]
        force: bool,
    },
    /// Search subspaces of the solution space for genus/point trade-offs.
    Search {
        #[command(flatten)]
        common: Common,
        /// Largest family dimension to try.
        #[arg(long)]
        max_dim: Option<usize>,
        /// Total number of subspaces the search may evaluate.
        #[arg(long)]
        budget: Option<u64>,
        /// exhaustive, greedy or random (default: exhaustive while it fits
        /// the budget, then heuristics).
        #[arg(long)]
        strategy: Option<String>,
        /// Seed for the heuristic strategies.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Recount a fibre product by brute force and compare with the formulas.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Comma-separated basis expressions (default: the whole solution
        /// space of the trace system).
        #[arg(long, value_delimiter = ',')]
        basis: Option<Vec<String>>,
    },
    /// Print a basis of the Riemann-Roch space of the divisor.
    Lspace {
        #[command(flatten)]
        common: Common,
    },
    /// Count points over small extensions and fit the zeta numerator.
    Zeta {
        #[command(flatten)]
        common: Common,
        /// A single cover expression; omitted means the base curve itself.
        #[arg(long)]
        basis: Option<String>,
    },
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::Solve { common }
            | Command::Analyze { common, .. }
            | Command::Search { common, .. }
            | Command::Verify { common, .. }
            | Command::Lspace { common }
            | Command::Zeta { common, .. } => common,
        }
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    let common = cli.command.common();
    let format: Format = common.format.parse()?;
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global()
            .map_err(|e| Error::Invalid(format!("cannot size the thread pool: {e}")))?;
    }
    let job = config::load_job(&common.config, common.precision)?;
    let report = match &cli.command {
        Command::Solve { .. } => commands::cmd_solve(&job)?,
        Command::Analyze { basis, force, .. } => commands::cmd_analyze(&job, basis, *force)?,
        Command::Search {
            max_dim,
            budget,
            strategy,
            seed,
            ..
        } => commands::cmd_search(
            &job,
            &SearchOverrides {
                max_dim: *max_dim,
                budget: *budget,
                strategy: strategy.clone(),
                seed: *seed,
            },
        )?,
        Command::Verify { basis, .. } => commands::cmd_verify(&job, basis.as_deref())?,
        Command::Lspace { .. } => commands::cmd_lspace(&job)?,
        Command::Zeta { basis, .. } => commands::cmd_zeta(&job, basis.as_ref())?,
    };
    report::emit(&report, format, common.out.as_deref())
}

/// Input problems exit with 2; violated internal invariants with 3.
fn exit_code(e: &Error) -> u8 {
    match e {
        Error::CountMismatch(_)
        | Error::OracleMismatch(_)
        | Error::DimensionMismatch(_)
        | Error::FitInconsistent(_)
        | Error::WeilViolated { .. }
        | Error::Internal(_)
        | Error::IndeterminatePrecision
        | Error::NonSimpleRoot(_)
        | Error::ZeroDivide
        | Error::FieldMismatch => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
