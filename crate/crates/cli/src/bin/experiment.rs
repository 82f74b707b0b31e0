//! Runs a grid of (k, algorithm) cells and prints a per-iteration runtime
//! table with distance-calculation counts.

use clap::Parser;
use dtkmeans::harness::{generate, run_experiment, ExperimentConfig, Generator, SyntheticSpec, TrackingAllocator};
use dtkmeans::{io, Algorithm, Execution};
use std::path::PathBuf;
use std::process::ExitCode;

#[global_allocator]
static ALLOC: TrackingAllocator = TrackingAllocator;

#[derive(Debug, Parser)]
#[command(name = "kmeans-experiment", version)]
struct Args {
    /// Dataset CSV. Without it a synthetic dataset is generated.
    #[arg(short = 'i', long = "input")]
    input: Option<PathBuf>,
    #[arg(long = "header")]
    header: bool,
    #[arg(long = "generator", default_value = "gaussian-mixture")]
    generator: Generator,
    #[arg(short = 'n', long = "points", default_value_t = 100_000)]
    n: usize,
    #[arg(short = 'd', long = "dims", default_value_t = 2)]
    d: usize,
    #[arg(long = "true-k", default_value_t = 250)]
    true_k: usize,
    #[arg(long = "spread", default_value_t = 0.01)]
    spread: f64,
    #[arg(long = "data-seed", default_value_t = 1)]
    data_seed: u64,
    /// Comma-separated cluster counts.
    #[arg(short = 'k', long = "clusters", value_delimiter = ',', default_values_t = [100, 250])]
    ks: Vec<usize>,
    /// Comma-separated algorithms; all by default.
    #[arg(short = 'a', long = "algorithms", value_delimiter = ',')]
    algorithms: Vec<Algorithm>,
    #[arg(long = "reps", default_value_t = 3)]
    reps: usize,
    #[arg(short = 'm', long = "max-iterations", default_value_t = 1000)]
    max_iterations: usize,
    #[arg(short = 't', long = "tolerance", default_value_t = 1e-6)]
    tolerance: f64,
    /// Seed for the initial centroids of every cell.
    #[arg(short = 's', long = "seed", default_value_t = 0)]
    seed: u64,
    #[arg(long = "leaf-size", default_value_t = 20)]
    leaf_size: usize,
    #[arg(long = "sequential")]
    sequential: bool,
    /// One JSON record per cell.
    #[arg(long = "jsonl")]
    jsonl: Option<PathBuf>,
}

fn run(args: Args) -> dtkmeans::Result<()> {
    let (name, data) = match &args.input {
        Some(path) => (path.display().to_string(), io::read_dataset(path, args.header)?),
        None => {
            let spec = SyntheticSpec {
                generator: args.generator,
                n: args.n,
                d: args.d,
                true_k: args.true_k,
                spread: args.spread,
                seed: args.data_seed,
            };
            (spec.name(), generate(&spec)?)
        }
    };
    let algorithms = if args.algorithms.is_empty() {
        Algorithm::ALL.to_vec()
    } else {
        args.algorithms
    };
    let config = ExperimentConfig {
        reps: args.reps,
        max_iterations: args.max_iterations,
        tolerance: args.tolerance,
        seed: args.seed,
        leaf_size: args.leaf_size,
        execution: if args.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
        measure_memory: true,
    };
    let report = run_experiment(&name, &data, &args.ks, &algorithms, &config)?;
    print!("{}", report.table());
    if let Some(path) = args.jsonl {
        std::fs::write(path, report.jsonl())?;
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kmeans-experiment: {e}");
            ExitCode::FAILURE
        }
    }
}
