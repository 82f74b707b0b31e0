use super::measure_peak;
use crate::error::{usage, Result};
use crate::kmeans::{cluster, random_initial_centroids, Algorithm, ClusteringConfig};
use crate::metric::Dataset;
use crate::par::Execution;
use serde::Serialize;
use std::collections::hash_map::DefaultHasher;
use std::fmt::Write as _;
use std::hash::Hasher;

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    /// Full runs per cell; timings report the mean and the median.
    pub reps: usize,
    pub max_iterations: usize,
    pub tolerance: f64,
    /// Seed for sampling the initial centroids of every cell.
    pub seed: u64,
    pub leaf_size: usize,
    pub execution: Execution,
    /// Track peak heap use on the first repetition.
    pub measure_memory: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            reps: 3,
            max_iterations: 1000,
            tolerance: 1e-6,
            seed: 0,
            leaf_size: 20,
            execution: Execution::default(),
            measure_memory: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", content = "message", rename_all = "snake_case")]
pub enum CellStatus {
    Ok,
    Failed(String),
}

/// One (k, algorithm) outcome.
#[derive(Clone, Debug, Serialize)]
pub struct Cell {
    pub dataset: String,
    #[serde(rename = "N")]
    pub n: usize,
    pub d: usize,
    pub k: usize,
    pub algorithm: String,
    pub iterations: usize,
    pub converged: bool,
    pub avg_iter_ms: f64,
    pub median_iter_ms: f64,
    pub avg_distance_calcs: f64,
    pub peak_tracked_bytes: Option<usize>,
    /// Identical across a row: every algorithm starts from the same centroids.
    pub init_hash: String,
    #[serde(flatten)]
    pub status: CellStatus,
}

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub cells: Vec<Cell>,
}

impl Report {
    pub fn cell(&self, k: usize, algorithm: Algorithm) -> Option<&Cell> {
        self.cells.iter().find(|c| c.k == k && c.algorithm == algorithm.name())
    }

    /// Aligned text table, one row per k and one column per algorithm.
    /// Each entry reads `avg time per iteration (avg distance calculations)`.
    pub fn table(&self) -> String {
        let mut algos: Vec<&str> = Vec::new();
        let mut rows: Vec<(&str, usize)> = Vec::new();
        for c in &self.cells {
            if !algos.contains(&c.algorithm.as_str()) {
                algos.push(&c.algorithm);
            }
            if !rows.contains(&(c.dataset.as_str(), c.k)) {
                rows.push((&c.dataset, c.k));
            }
        }
        let mut grid = vec![{
            let mut h = vec!["dataset".to_string(), "k".to_string()];
            h.extend(algos.iter().map(|a| a.to_string()));
            h
        }];
        for &(ds, k) in &rows {
            let mut r = vec![ds.to_string(), k.to_string()];
            for a in &algos {
                let entry = self
                    .cells
                    .iter()
                    .find(|c| c.dataset == ds && c.k == k && c.algorithm == *a);
                r.push(match entry {
                    None => "-".into(),
                    Some(Cell {
                        status: CellStatus::Failed(_),
                        ..
                    }) => "failed".into(),
                    Some(c) => format!("{:.3}ms ({})", c.avg_iter_ms, short_count(c.avg_distance_calcs)),
                });
            }
            grid.push(r);
        }
        let widths: Vec<usize> = (0..grid[0].len())
            .map(|i| grid.iter().map(|r| r[i].len()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for r in &grid {
            let line: Vec<String> = r.iter().zip(&widths).map(|(s, w)| format!("{s:>w$}")).collect();
            writeln!(out, "{}", line.join("  ").trim_end()).unwrap();
        }
        out
    }

    /// One JSON object per cell per line.
    pub fn jsonl(&self) -> String {
        let mut out = String::new();
        for c in &self.cells {
            out.push_str(&serde_json::to_string(c).expect("cells serialize"));
            out.push('\n');
        }
        out
    }
}

fn short_count(n: f64) -> String {
    match n {
        n if n >= 1e9 => format!("{:.1}G", n / 1e9),
        n if n >= 1e6 => format!("{:.1}M", n / 1e6),
        n if n >= 1e3 => format!("{:.1}k", n / 1e3),
        n => format!("{n:.0}"),
    }
}

fn hash_dataset(d: &Dataset) -> String {
    let mut h = DefaultHasher::new();
    h.write_usize(d.dim());
    for v in d.values() {
        h.write_u64(v.to_bits());
    }
    format!("{:016x}", h.finish())
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// Runs every algorithm for every k on `data`. Cells run one after another
/// so that tracked peaks belong to a single run. A failing algorithm is
/// recorded in its cell and the rest of the grid still runs.
pub fn run_experiment(
    dataset: &str,
    data: &Dataset,
    ks: &[usize],
    algorithms: &[Algorithm],
    config: &ExperimentConfig,
) -> Result<Report> {
    if config.reps == 0 {
        return usage("experiment needs at least one repetition");
    }
    let mut report = Report::default();
    for &k in ks {
        let initial = random_initial_centroids(data, k, config.seed);
        let init_hash = initial.as_ref().map(hash_dataset).unwrap_or_default();
        for &algorithm in algorithms {
            let mut cell = Cell {
                dataset: dataset.to_string(),
                n: data.len(),
                d: data.dim(),
                k,
                algorithm: algorithm.name().to_string(),
                iterations: 0,
                converged: false,
                avg_iter_ms: 0.0,
                median_iter_ms: 0.0,
                avg_distance_calcs: 0.0,
                peak_tracked_bytes: None,
                init_hash: init_hash.clone(),
                status: CellStatus::Ok,
            };
            let initial = match &initial {
                Ok(i) => i,
                Err(e) => {
                    cell.status = CellStatus::Failed(e.to_string());
                    report.cells.push(cell);
                    continue;
                }
            };
            let cc = ClusteringConfig {
                max_iterations: config.max_iterations,
                tolerance: config.tolerance,
                seed: config.seed,
                execution: config.execution,
                leaf_size: config.leaf_size,
                ..ClusteringConfig::new(k)
            };
            let mut per_rep_ms = Vec::with_capacity(config.reps);
            for rep in 0..config.reps {
                let (res, peak) = if rep == 0 && config.measure_memory {
                    measure_peak(|| cluster(data, initial, algorithm, &cc))
                } else {
                    (cluster(data, initial, algorithm, &cc), None)
                };
                let res = match res {
                    Ok(r) => r,
                    Err(e) => {
                        cell.status = CellStatus::Failed(e.to_string());
                        break;
                    }
                };
                let iters = res.iterations.len().max(1) as f64;
                let ms: f64 = res.iterations.iter().map(|s| s.wall_time.as_secs_f64() * 1e3).sum();
                per_rep_ms.push(ms / iters);
                if rep == 0 {
                    cell.iterations = res.iterations.len();
                    cell.converged = res.converged;
                    cell.avg_distance_calcs =
                        res.iterations.iter().map(|s| s.distance_calcs as f64).sum::<f64>() / iters;
                    cell.peak_tracked_bytes = peak;
                }
            }
            if cell.status == CellStatus::Ok {
                cell.avg_iter_ms = per_rep_ms.iter().sum::<f64>() / per_rep_ms.len() as f64;
                cell.median_iter_ms = median(per_rep_ms);
            }
            report.cells.push(cell);
        }
    }
    Ok(report)
}
