//! `relu-constructor` command-line front end.
//!
//! Exit codes: 0 success (all certificates pass), 1 validation error,
//! 2 computational failure, 3 certification failure.

mod commands;
mod config;
mod table;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::CliError;

#[derive(Parser, Debug)]
#[command(name = "relu-constructor", version, about = "Certified ReLU approximants, planners and rate sweeps")]
struct Cli {
    /// JSON run configuration for the subcommand; keys may not repeat flags.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed; falls back to RELU_CONSTRUCTOR_SEED, then 0.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for sweeps and grid certification (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build approximants and write networks plus certificates.
    ApproxBuild(ApproxBuildArgs),
    /// Re-measure a network against its certificate.
    ApproxVerify(ApproxVerifyArgs),
    /// Run a convergence-rate sweep and write CSV, JSON and plot data.
    SweepRate(SweepRateArgs),
    /// Plan width and depth for a sample size.
    Plan(PlanArgs),
    /// Network relative efficiency.
    Nre(NreArgs),
    /// Build a random projection and audit its distortion.
    Project(ProjectArgs),
    /// Estimate the Minkowski dimension of a point sample.
    Minkowski(MinkowskiArgs),
    /// Generate a synthetic regression dataset.
    DatasetGen(DatasetGenArgs),
}

#[derive(Args, Debug, Default)]
pub struct ApproxBuildArgs {
    /// Builtin target name.
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long = "b0")]
    pub b0: Option<f64>,
    #[arg(long = "n")]
    pub n: Option<u64>,
    #[arg(long = "m")]
    pub m: Option<u64>,
    /// holder or uniform.
    #[arg(long)]
    pub kind: Option<String>,
    /// simple or paper-budget.
    #[arg(long)]
    pub profile: Option<String>,
    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct ApproxVerifyArgs {
    #[arg(long)]
    pub network: Option<PathBuf>,
    #[arg(long)]
    pub certificate: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct SweepRateArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct PlanArgs {
    #[arg(long)]
    pub beta: Option<f64>,
    /// Effective dimension.
    #[arg(long)]
    pub d: Option<u32>,
    /// Sample size.
    #[arg(long = "n")]
    pub n: Option<u64>,
    #[arg(long)]
    pub profile: Option<String>,
    /// Free N of the deep-fixed-width and manifold profiles.
    #[arg(long)]
    pub n_param: Option<u64>,
    /// Free M of the wide-fixed-depth profile.
    #[arg(long)]
    pub m_param: Option<u64>,
    #[arg(long)]
    pub clip: Option<f64>,
    /// Also write plan.json here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct NreArgs {
    /// Sizes S1 and S2; prints ln S2 / ln S1.
    pub sizes: Vec<f64>,
    /// Compare two planner profiles instead of sizes.
    #[arg(long, num_args = 2, value_names = ["FIRST", "SECOND"])]
    pub profiles: Option<Vec<String>>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub d: Option<f64>,
}

#[derive(Args, Debug, Default)]
pub struct ProjectArgs {
    /// rademacher_scaled or ortho_scaled.
    #[arg(long)]
    pub kind: Option<String>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long)]
    pub d0: Option<usize>,
    /// CSV of points to audit (columns x1..xd, optional y).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Number of random pairs in the audit.
    #[arg(long)]
    pub pairs: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct MinkowskiArgs {
    /// CSV of points (columns x1..xd, optional y).
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Comma-separated radii, at least two.
    #[arg(long, value_delimiter = ',')]
    pub radii: Option<Vec<f64>>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
pub struct DatasetGenArgs {
    #[arg(long)]
    pub target: Option<String>,
    #[arg(long)]
    pub beta: Option<f64>,
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long = "b0")]
    pub b0: Option<f64>,
    #[arg(long = "n")]
    pub n: Option<usize>,
    /// Output CSV path; the JSON sidecar is written next to it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn run(cli: Cli) -> Result<commands::Status, CliError> {
    if let Some(j) = cli.jobs {
        if j == 0 {
            return Err(CliError::Validation("--jobs must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build_global()
            .map_err(|e| CliError::Compute(format!("cannot start the worker pool: {e}")))?;
    }
    let ctx = commands::Context::new(cli.config, cli.seed)?;
    match cli.command {
        Command::ApproxBuild(a) => commands::approx_build(&ctx, a),
        Command::ApproxVerify(a) => commands::approx_verify(&ctx, a),
        Command::SweepRate(a) => commands::sweep_rate(&ctx, a),
        Command::Plan(a) => commands::plan(&ctx, a),
        Command::Nre(a) => commands::nre(&ctx, a),
        Command::Project(a) => commands::project(&ctx, a),
        Command::Minkowski(a) => commands::minkowski(&ctx, a),
        Command::DatasetGen(a) => commands::dataset_gen(&ctx, a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(commands::Status::Ok) => ExitCode::SUCCESS,
        Ok(commands::Status::CertificationFailed) => ExitCode::from(3),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
