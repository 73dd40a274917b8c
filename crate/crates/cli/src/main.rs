//! Command-line front end.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 numerical
//! failure, 4 I/O error, 5 modifier verification failure.

mod commands;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mflangevin::Error;

#[derive(Parser)]
#[command(name = "mflangevin", version, about = "Mean-field Langevin barycenter simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Debug, Default)]
pub struct Common {
    /// Flat `key = value` configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override a configuration key, e.g. `--set sigma=0.6`. Repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Stationary means over a grid of sigma.
    PhaseDiagram {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        out: PathBuf,
        /// Stop when two iterates differ by less than this.
        #[arg(long, default_value_t = mflangevin::fixedpoint::FIGURE_ITERATION_TOL)]
        tol: f64,
    },
    /// All fixed points of the self-consistency map, as JSON.
    FixedPoints {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        sigma: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Noise level above which the stationary solution is unique.
    CriticalSigma {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.3)]
        lo: f64,
        #[arg(long, default_value_t = 1.0)]
        hi: f64,
        #[arg(long, default_value_t = 1e-4)]
        tol: f64,
    },
    /// One particle-system trajectory.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Negate the initial law and every Gaussian draw.
        #[arg(long)]
        mirror: bool,
    },
    /// Exit times of the barycenter from [a, ∞) over independent replicas.
    ExitTimes {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        domain_a: Option<f64>,
        #[arg(long)]
        replicas: Option<usize>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Builds and verifies the modified drift for [a, ∞).
    ModifierCheck {
        #[command(flatten)]
        common: Common,
        #[arg(long, allow_hyphen_values = true)]
        domain_a: Option<f64>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Single-particle occupation histogram against the Gibbs density.
    GibbsOracle {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        steps: Option<u64>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidParams(_) | Error::InvalidConfig(_) | Error::InvalidDomain(_) => 2,
        Error::File { .. } => 4,
        Error::VerificationFailed(_) => 5,
        _ => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::PhaseDiagram { common, out, tol } => commands::phase_diagram(&common, &out, tol),
        Command::FixedPoints { common, sigma, out } => commands::fixed_points(&common, sigma, out.as_deref()),
        Command::CriticalSigma { common, lo, hi, tol } => commands::critical_sigma(&common, lo, hi, tol),
        Command::Simulate { common, out, mirror } => commands::simulate(&common, &out, mirror),
        Command::ExitTimes {
            common,
            domain_a,
            replicas,
            out,
        } => commands::exit_times(&common, domain_a, replicas, &out),
        Command::ModifierCheck { common, domain_a, out } => commands::modifier_check(&common, domain_a, &out),
        Command::GibbsOracle { common, steps, out } => commands::gibbs_oracle(&common, steps, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
