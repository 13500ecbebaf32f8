use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use tailstab_cli::config::{ExperimentConfig, Mode};
use tailstab_cli::pipeline::{execute_to_dir, print_checks};

/// Simulation and verification runner for tail-dependent time series.
#[derive(Parser)]
#[command(name = "tailstab", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate the tail-stability curve, its decay fit and cumulative sum.
    Tas(RunArgs),
    /// Tail autocorrelation, tail empirical distribution, high quantile fit.
    Tailstats(RunArgs),
    /// Compare simulations against the exact analytic oracles.
    Verify(RunArgs),
    /// Run all pipelines.
    Full(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// JSON experiment configuration.
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides the config's `outputs` field).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker thread count; falls back to TAILSTAB_THREADS, then to the
    /// number of cores. Outputs are identical for any value.
    #[arg(long)]
    threads: Option<usize>,
}

fn thread_count(args: &RunArgs) -> Option<usize> {
    args.threads.or_else(|| {
        std::env::var("TAILSTAB_THREADS")
            .ok()
            .and_then(|v| v.parse().ok())
    })
}

fn run(mode: Mode, args: &RunArgs) -> anyhow::Result<bool> {
    if let Some(n) = thread_count(args) {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| anyhow::anyhow!("configuring {n} worker threads: {e}"))?;
    }
    let mut config = ExperimentConfig::from_path(&args.config)?;
    config.mode = mode;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    let out_dir = args
        .out
        .clone()
        .or_else(|| config.outputs.as_ref().map(PathBuf::from))
        .ok_or_else(|| anyhow::anyhow!("no output directory: pass --out or set the config field `outputs`"))?;
    let report = execute_to_dir(&config, &out_dir)?;
    print_checks(&report);
    println!(
        "report written to {} ({:.2}s)",
        out_dir.display(),
        report.wall_clock_seconds
    );
    Ok(report.any_failed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (mode, args) = match &cli.command {
        Command::Tas(a) => (Mode::TasCurve, a),
        Command::Tailstats(a) => (Mode::TailStats, a),
        Command::Verify(a) => (Mode::Verify, a),
        Command::Full(a) => (Mode::Full, a),
    };
    match run(mode, args) {
        Ok(false) => ExitCode::SUCCESS,
        Ok(true) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
