//! Command-line front end: simulation runs, imputation of user data and
//! standalone pooling.

mod apply;
mod config;
mod pool;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "multistage-mi", version, about = "Multistage multiple imputation for two-wave data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the Monte Carlo comparison of the three strategies.
    Simulate(SimulateArgs),
    /// Complete a CSV dataset with every strategy and fit a linear model.
    Apply(ApplyArgs),
    /// Pool per-dataset estimates from a CSV file.
    Pool(PoolArgs),
}

/// Settings shared by `simulate` and `apply`; flags override the file.
#[derive(Debug, Args, Default)]
pub struct CommonArgs {
    /// Flat TOML file whose keys match the long flag names.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Imputations for re-imputation.
    #[arg(long)]
    pub m: Option<usize>,
    /// First-stage imputations for nested and appended imputation.
    #[arg(long)]
    pub m1: Option<usize>,
    /// Second-stage imputations per nest for nested imputation.
    #[arg(long)]
    pub m2: Option<usize>,
    /// Chained-equation sweeps per imputation.
    #[arg(long)]
    pub iterations: Option<usize>,
    /// Imputation method: norm or pmm.
    #[arg(long)]
    pub method: Option<String>,
    /// Worker threads (results do not depend on this).
    #[arg(long)]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Scenario ids, comma separated (default: all sixteen).
    #[arg(long, value_delimiter = ',')]
    pub scenarios: Option<Vec<u8>>,
    /// Missingness kinds: monotone, nonmonotone.
    #[arg(long, value_delimiter = ',')]
    pub missingness: Option<Vec<String>>,
    /// Strategies: reimpute, nested, appended.
    #[arg(long, value_delimiter = ',')]
    pub strategies: Option<Vec<String>>,
    /// Replications per cell.
    #[arg(long)]
    pub reps: Option<usize>,
    /// Sample size.
    #[arg(long)]
    pub n: Option<usize>,
    /// Output directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Evaluate the validity and efficiency checks; failures give exit code 1.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Args)]
pub struct ApplyArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Input CSV; missing cells are `NA`.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// TOML column schema.
    #[arg(long)]
    pub schema: Option<PathBuf>,
    /// Outcome of the analysis model.
    #[arg(long)]
    pub outcome: Option<String>,
    /// Predictors of the analysis model, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub predictors: Option<Vec<String>>,
    /// Write the table here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Directory for the completed datasets.
    #[arg(long)]
    pub export: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PoolArgs {
    /// CSV with columns nest, dataset, estimate, variance and optionally parameter.
    #[arg(long)]
    pub input: PathBuf,
    /// Confidence level of the intervals.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Write the table here instead of standard output.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(a) => simulate::run(a),
        Command::Apply(a) => apply::run(a).map(|()| true),
        Command::Pool(a) => pool::run(a).map(|()| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
