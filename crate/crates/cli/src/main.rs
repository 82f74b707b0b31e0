//! `kmeans -i dataset.csv -c K [-I centroids.csv] [-a ALGORITHM] ...`

mod error;

use clap::Parser;
use dtkmeans::kmeans::{cluster_with, random_initial_centroids};
use dtkmeans::tree::{SpaceTree, TreeKind};
use dtkmeans::{io, Algorithm, ClusteringConfig, Dataset, Execution};
use error::CliError;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

/// Exact k-means clustering with dual-tree, Hamerly, Elkan or naive Lloyd
/// iterations. All algorithms produce identical assignments.
#[derive(Debug, Parser)]
#[command(name = "kmeans", version)]
struct Cli {
    /// Dataset CSV, one point per row.
    #[arg(short = 'i', long = "input")]
    input: PathBuf,
    /// Initial centroids CSV with exactly K rows. Without it, K points are
    /// sampled from the dataset.
    #[arg(short = 'I', long = "initial-centroids")]
    initial_centroids: Option<PathBuf>,
    /// Number of clusters K.
    #[arg(short = 'c', long = "clusters", value_parser = clap::value_parser!(u64).range(1..))]
    clusters: u64,
    /// naive, elkan, hamerly, dualtree-kd or dualtree-ct.
    #[arg(short = 'a', long = "algorithm", default_value = "dualtree-kd")]
    algorithm: Algorithm,
    #[arg(short = 'm', long = "max-iterations", default_value_t = 1000)]
    max_iterations: usize,
    /// Converged once no centroid moves farther than this.
    #[arg(short = 't', long = "tolerance", default_value_t = 1e-6)]
    tolerance: f64,
    /// Seed for sampling initial centroids.
    #[arg(short = 's', long = "seed", default_value_t = 0)]
    seed: u64,
    /// Final centroids CSV; printed to stdout when no output is given.
    #[arg(short = 'o', long = "output-centroids")]
    output_centroids: Option<PathBuf>,
    /// Assignments file, one zero-based centroid index per line.
    #[arg(short = 'O', long = "output-assignments")]
    output_assignments: Option<PathBuf>,
    /// Per-iteration statistics as JSON lines.
    #[arg(long = "stats")]
    stats: Option<PathBuf>,
    /// Maximum points per kd-tree leaf.
    #[arg(long = "leaf-size", default_value_t = 20)]
    leaf_size: usize,
    /// Skip the first row of every CSV input.
    #[arg(long = "header")]
    header: bool,
    /// Single-threaded baselines.
    #[arg(long = "sequential")]
    sequential: bool,
    /// Write the point tree of the chosen tree type to this file.
    #[arg(long = "dump-tree")]
    dump_tree: Option<PathBuf>,
    /// Progress on stderr.
    #[arg(short = 'v', long = "verbose")]
    verbose: bool,
}

fn create(path: &PathBuf) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::Output {
            path: path.display().to_string(),
            source,
        })
}

fn load_initial(cli: &Cli, data: &Dataset, k: usize) -> Result<Dataset, CliError> {
    let Some(path) = &cli.initial_centroids else {
        return random_initial_centroids(data, k, cli.seed).map_err(|e| CliError::Usage {
            flag: "-c/--clusters",
            message: e.to_string(),
        });
    };
    let flag = "-I/--initial-centroids";
    let initial = io::read_dataset(path, cli.header).map_err(|source| CliError::Input { flag, source })?;
    if initial.len() != k {
        return Err(CliError::Usage {
            flag,
            message: format!(
                "{} holds {} centroids but -c/--clusters is {k}",
                path.display(),
                initial.len()
            ),
        });
    }
    if initial.dim() != data.dim() {
        return Err(CliError::Usage {
            flag,
            message: format!(
                "centroids have {} dimensions but the dataset has {}",
                initial.dim(),
                data.dim()
            ),
        });
    }
    Ok(initial)
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let data = io::read_dataset(&cli.input, cli.header).map_err(|source| CliError::Input {
        flag: "-i/--input",
        source,
    })?;
    let k = usize::try_from(cli.clusters).unwrap_or(usize::MAX);
    if k > data.len() {
        return Err(CliError::Usage {
            flag: "-c/--clusters",
            message: format!("{k} clusters requested but the dataset has {} points", data.len()),
        });
    }
    if !cli.tolerance.is_finite() || cli.tolerance < 0.0 {
        return Err(CliError::Usage {
            flag: "-t/--tolerance",
            message: format!("must be finite and non-negative, got {}", cli.tolerance),
        });
    }
    for (flag, v) in [
        ("-m/--max-iterations", cli.max_iterations),
        ("--leaf-size", cli.leaf_size),
    ] {
        if v == 0 {
            return Err(CliError::Usage {
                flag,
                message: "must be at least 1".into(),
            });
        }
    }
    let initial = load_initial(cli, &data, k)?;
    let config = ClusteringConfig {
        max_iterations: cli.max_iterations,
        tolerance: cli.tolerance,
        seed: cli.seed,
        leaf_size: cli.leaf_size,
        execution: if cli.sequential {
            Execution::Sequential
        } else {
            Execution::Parallel
        },
        ..ClusteringConfig::new(k)
    };

    if let Some(path) = &cli.dump_tree {
        let kind = match cli.algorithm {
            Algorithm::DualTreeCover => TreeKind::Cover,
            _ => TreeKind::Kd,
        };
        let tree = SpaceTree::build(&data, kind, cli.leaf_size)?;
        let mut w = create(path)?;
        write!(w, "{}", tree.dump())
            .and_then(|_| w.flush())
            .map_err(|source| CliError::Output {
                path: path.display().to_string(),
                source,
            })?;
        if cli.verbose {
            if let Ok(i) = tree.imbalance() {
                eprintln!("cover tree imbalance {i}, depth {}", tree.depth());
            }
        }
    }

    if cli.verbose {
        eprintln!(
            "{} points in {} dimensions, k = {k}, algorithm {}",
            data.len(),
            data.dim(),
            cli.algorithm
        );
    }
    let verbose = cli.verbose;
    let result = cluster_with(&data, &initial, cli.algorithm, &config, |s, _| {
        if verbose {
            eprintln!(
                "iteration {}: {} distance calculations, max movement {:e}, {:.3}ms",
                s.iteration,
                s.distance_calcs,
                s.max_movement,
                s.wall_time.as_secs_f64() * 1e3
            );
        }
    })?;
    if verbose {
        let state = if result.converged { "converged" } else { "stopped" };
        eprintln!("{state} after {} iterations", result.iterations.len());
    }

    if let Some(path) = &cli.stats {
        let mut w = create(path)?;
        for s in &result.iterations {
            let line = serde_json::to_string(s).map_err(dtkmeans::Error::from)?;
            writeln!(w, "{line}").map_err(|source| CliError::Output {
                path: path.display().to_string(),
                source,
            })?;
        }
        w.flush().map_err(|source| CliError::Output {
            path: path.display().to_string(),
            source,
        })?;
    }
    if let Some(path) = &cli.output_assignments {
        io::write_assignments(path, &result.assignments)?;
    }
    match &cli.output_centroids {
        Some(path) => io::write_centroids(path, &result.centroids)?,
        None if cli.output_assignments.is_none() => {
            io::write_dataset_to(std::io::stdout().lock(), result.centroids.positions())?
        }
        None => {}
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("kmeans: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
