//! `equimetric` — transforms, flows, sweeps, and verification for the
//! affine measurement-linkage model.

mod commands;
mod config;
mod manifest;
mod plot;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use equimetric::Error;

/// Exit status for bad flags, bad config files, and precondition
/// violations on flag values.
const EXIT_USAGE: u8 = 2;
/// Exit status for domain and flow errors raised during computation.
const EXIT_DOMAIN: u8 = 3;
/// Exit status when a verification check fails.
const EXIT_VERIFY_FAILED: u8 = 1;

#[derive(Debug, Parser)]
#[command(name = "equimetric", version, about = "Measurement linkage symmetries: transforms, flows, sweeps, verification")]
struct Cli {
    /// Master RNG seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Emit machine-readable JSON on the diagnostic stream for errors.
    #[arg(long, global = true)]
    json: bool,

    /// Directory for output files.
    #[arg(long, global = true, value_name = "DIR")]
    out_dir: Option<std::path::PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Apply a linkage to one measurement vector and print the result
    /// with its generator.
    Transform(TransformArgs),
    /// Integrate a transformation flow and write its trace.
    Flow(FlowArgs),
    /// Run the symmetry-breaking exponent sweep.
    Sweep(SweepArgs),
    /// Run the cross-module property suite.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
struct TransformArgs {
    /// Scale factor, must be positive.
    #[arg(long, allow_negative_numbers = true)]
    gamma: f64,
    /// Translation of true scores.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    omega: f64,
    /// True score to transform.
    #[arg(long, allow_negative_numbers = true)]
    tau: f64,
    /// Error SD to transform, must be nonnegative.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    sigma_e: f64,
}

#[derive(Debug, Args)]
struct FlowArgs {
    /// Scale factor (default 1.125).
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    /// Translation (default 0).
    #[arg(long, allow_negative_numbers = true)]
    omega: Option<f64>,
    /// RK4 steps over [0, 1]; minimum 10, default 1000.
    #[arg(long)]
    steps: Option<usize>,
    /// Replace the first population's mean rate (e.g. constant:1.5,
    /// linear:0.5, power:2,1.5).
    #[arg(long, value_name = "RATE")]
    break_mean_rate: Option<String>,
    /// Replace the first population's error-SD rate.
    #[arg(long, value_name = "RATE")]
    break_var_rate: Option<String>,
    /// Initial means and SDs; defaults are the standard flow state.
    #[arg(long, allow_negative_numbers = true)]
    mu1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mu2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    tau_sd1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    tau_sd2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    err_sd1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    err_sd2: Option<f64>,
    /// Reproduce a previous run from its manifest file.
    #[arg(long, value_name = "FILE")]
    from_manifest: Option<std::path::PathBuf>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    /// Flat key = value config file (keys: n, mu1, sd1, mu2, sd2,
    /// gamma, k_start, k_end, k_step, seed).
    #[arg(long, value_name = "FILE")]
    config: Option<std::path::PathBuf>,
    /// Reproduce a previous run from its manifest file.
    #[arg(long, value_name = "FILE")]
    from_manifest: Option<std::path::PathBuf>,
    /// Scores per population.
    #[arg(long)]
    n: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    mu1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sd1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    mu2: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    sd2: Option<f64>,
    /// Linkage scale.
    #[arg(long, allow_negative_numbers = true)]
    gamma: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    k_start: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    k_end: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    k_step: Option<f64>,
    /// Also emit an SVG chart of the sweep.
    #[arg(long)]
    plot: bool,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Monte Carlo size; tolerances widen by sqrt(100000/n).
    #[arg(long, default_value_t = 100_000)]
    n: usize,
}

/// A CLI failure carrying its exit status.
#[derive(Debug)]
struct Failure {
    kind: &'static str,
    message: String,
    code: u8,
}

impl Failure {
    fn from_error(err: Error) -> Self {
        match err {
            Error::InvalidConfig(_)
            | Error::Parse(_)
            | Error::ScaleNotPositive { .. }
            | Error::NegativeErrorSd { .. } => Self {
                kind: "usage",
                message: err.to_string(),
                code: EXIT_USAGE,
            },
            Error::VarianceCollapse { .. } => Self {
                kind: "flow",
                message: err.to_string(),
                code: EXIT_DOMAIN,
            },
            other => Self {
                kind: "domain",
                message: other.to_string(),
                code: EXIT_DOMAIN,
            },
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Self {
        Failure::from_error(err)
    }
}

impl From<std::io::Error> for Failure {
    fn from(err: std::io::Error) -> Self {
        Self {
            kind: "io",
            message: err.to_string(),
            code: EXIT_DOMAIN,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Transform(args) => commands::transform(&cli, args),
        Command::Flow(args) => commands::flow(&cli, args),
        Command::Sweep(args) => commands::sweep(&cli, args),
        Command::Verify(args) => commands::verify(&cli, args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            if cli.json {
                let body = serde_json::json!({
                    "error": failure.message,
                    "kind": failure.kind,
                });
                eprintln!("{body}");
            } else {
                eprintln!("error: {}", failure.message);
            }
            ExitCode::from(failure.code)
        }
    }
}
