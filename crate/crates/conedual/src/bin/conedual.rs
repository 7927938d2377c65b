use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use conedual::runner::{run_config_file, RunOptions};
use conedual::trig::DEFAULT_EPS_PD;

/// Batch front-end: run a JSON-configured computation and emit a JSON report
/// plus a CSV bracket table.
#[derive(Parser)]
#[command(name = "conedual", version, about)]
struct Args {
    /// Path to the JSON run configuration.
    #[arg(long)]
    config: PathBuf,

    /// Output directory for report.json / bracket.csv.
    #[arg(long, default_value = "out")]
    out: PathBuf,

    /// Overrides the seed in the config.
    #[arg(long)]
    seed: Option<u64>,

    /// Worker-pool size (default: available cores).
    #[arg(long)]
    workers: Option<usize>,

    /// Positive-definiteness tolerance.
    #[arg(long, default_value_t = DEFAULT_EPS_PD)]
    eps_pd: f64,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("CONEDUAL_LOG")).init();
    let args = Args::parse();
    let opts = RunOptions {
        seed: args.seed,
        eps_pd: args.eps_pd,
        workers: args.workers,
    };
    ExitCode::from(run_config_file(&args.config, &args.out, &opts) as u8)
}
