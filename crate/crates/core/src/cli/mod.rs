//! The `hart` command line: `analyze`, `oracle` and `simulate`.
//!
//! Exit codes: 0 success, 2 usage or parse error, 3 too little data.

mod analyze;
mod format;
mod oracle;
mod simulate;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::HartError;

pub use analyze::{read_analysis_input, AnalysisInput, InputRow};
pub use format::fmt_g6;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INSUFFICIENT: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "hart", version, about = "Heteroscedasticity-adjusted ranking and thresholding")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run procedures on a CSV of (x, sigma[, theta]) rows.
    Analyze(AnalyzeArgs),
    /// Closed-form oracle thresholds and powers for the point-mass,
    /// uniform-scale model.
    Oracle(OracleArgs),
    /// Run a simulation described by a config file.
    Simulate(SimulateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum NullArg {
    Theoretical,
    Empirical,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Switch {
    On,
    Off,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    /// Comma list from hart, bh, az.
    #[arg(long, default_value = "hart,bh,az")]
    procedures: String,
    #[arg(long, value_enum, default_value_t = NullArg::Theoretical)]
    null: NullArg,
    #[arg(long, default_value_t = 0.99)]
    coverage: f64,
    /// Analyze only rows with sigma strictly below this value.
    #[arg(long)]
    sigma_cap: Option<f64>,
    #[arg(long, default_value_t = 0.5)]
    lambda: f64,
    #[arg(long, value_enum, default_value_t = Switch::On)]
    jackknife: Switch,
}

#[derive(Debug, Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 0.1)]
    pi: f64,
    #[arg(long, default_value_t = 2.0, allow_negative_numbers = true)]
    mu: f64,
    #[arg(long, default_value_t = 0.5)]
    sigma_lo: f64,
    #[arg(long, default_value_t = 4.0)]
    sigma_hi: f64,
    #[arg(long, default_value_t = 0.1)]
    alpha: f64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory for summary.csv and reps.csv.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// m = 20000 and 100 reps unless overridden.
    #[arg(long)]
    full_scale: bool,
}

fn exit_code(err: &HartError) -> i32 {
    match err {
        HartError::InsufficientData(_) | HartError::Estimation { .. } => EXIT_INSUFFICIENT,
        _ => EXIT_USAGE,
    }
}

/// Parses `args` (program name first) and runs the subcommand. Returns the
/// process exit code.
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
    let result = match cli.command {
        Command::Analyze(a) => analyze::cmd_analyze(&a),
        Command::Oracle(a) => oracle::cmd_oracle(&a),
        Command::Simulate(a) => simulate::cmd_simulate(&a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
