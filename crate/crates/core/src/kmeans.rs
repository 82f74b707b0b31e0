//! Shared clustering contract: configuration, the per-iteration step trait,
//! the run-to-convergence driver and random initialisation.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::baselines::{Elkan, Hamerly, Naive};
use crate::dualtree::DualTree;
use crate::error::{usage, Result};
use crate::harness::IterationStats;
use crate::metric::{euclidean, CentroidSet, Dataset};
use crate::par::Execution;
use crate::tree::TreeKind;

/// Rule for choosing between equidistant centroids. Only the lowest index is
/// supported; every algorithm applies it identically.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum TieBreak {
    #[default]
    LowestIndex,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClusteringConfig {
    pub k: usize,
    pub max_iterations: usize,
    /// Converged once no centroid moves farther than this.
    pub tolerance: f64,
    pub tie_break: TieBreak,
    pub seed: u64,
    pub execution: Execution,
    /// Leaf size of the kd-tree built on the points.
    pub leaf_size: usize,
}

impl ClusteringConfig {
    pub fn new(k: usize) -> Self {
        Self {
            k,
            max_iterations: 1000,
            tolerance: 1e-6,
            tie_break: TieBreak::LowestIndex,
            seed: 0,
            execution: Execution::default(),
            leaf_size: 20,
        }
    }

    pub fn validate(&self, data: &Dataset, initial: &Dataset) -> Result<()> {
        if self.k == 0 {
            return usage("k must be at least 1");
        }
        if self.k > data.len() {
            return usage(format!("k = {} exceeds the number of points ({})", self.k, data.len()));
        }
        if !(self.tolerance >= 0.0 && self.tolerance.is_finite()) {
            return usage(format!(
                "tolerance must be finite and non-negative, got {}",
                self.tolerance
            ));
        }
        if self.max_iterations == 0 {
            return usage("max_iterations must be at least 1");
        }
        if self.leaf_size == 0 {
            return usage("leaf size must be at least 1");
        }
        if initial.len() != self.k {
            return usage(format!("expected {} initial centroids, got {}", self.k, initial.len()));
        }
        if initial.dim() != data.dim() {
            return usage(format!(
                "initial centroids have dimension {}, data has dimension {}",
                initial.dim(),
                data.dim()
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Naive,
    Hamerly,
    Elkan,
    DualTreeKd,
    DualTreeCover,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Naive,
        Algorithm::Elkan,
        Algorithm::Hamerly,
        Algorithm::DualTreeKd,
        Algorithm::DualTreeCover,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Naive => "naive",
            Algorithm::Hamerly => "hamerly",
            Algorithm::Elkan => "elkan",
            Algorithm::DualTreeKd => "dualtree-kd",
            Algorithm::DualTreeCover => "dualtree-ct",
        }
    }

    /// Sets up per-run state for this algorithm.
    pub fn start<'a>(
        self,
        data: &'a Dataset,
        initial: &Dataset,
        config: &ClusteringConfig,
    ) -> Result<Box<dyn KMeansStep + 'a>> {
        config.validate(data, initial)?;
        let centroids = CentroidSet::new(initial.clone());
        Ok(match self {
            Algorithm::Naive => Box::new(Naive::new(data, centroids, config.execution)),
            Algorithm::Hamerly => Box::new(Hamerly::new(data, centroids, config.execution)),
            Algorithm::Elkan => Box::new(Elkan::new(data, centroids, config.execution)?),
            Algorithm::DualTreeKd => Box::new(DualTree::new(data, centroids, TreeKind::Kd, config.leaf_size)?),
            Algorithm::DualTreeCover => Box::new(DualTree::new(data, centroids, TreeKind::Cover, config.leaf_size)?),
        })
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        Algorithm::ALL.into_iter().find(|a| a.name() == s).map_or_else(
            || {
                let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
                usage(format!(
                    "unknown algorithm '{s}', expected one of: {}",
                    names.join(", ")
                ))
            },
            Ok,
        )
    }
}

/// One exact Lloyd iteration at a time.
pub trait KMeansStep {
    /// Assigns every point to its nearest current centroid, then moves the
    /// centroids to the means of their points. Fills the counting fields of
    /// the returned stats; the driver fills index, movement and timing.
    fn step(&mut self) -> Result<IterationStats>;

    /// Centroids after the most recent step, or the initial ones.
    fn centroids(&self) -> &CentroidSet;

    /// Owner of every point as decided by the most recent step.
    fn assignments(&self) -> &[usize];
}

#[derive(Clone, Debug)]
pub struct ClusteringResult {
    pub centroids: CentroidSet,
    pub assignments: Vec<usize>,
    pub iterations: Vec<IterationStats>,
    pub converged: bool,
}

pub fn cluster(
    data: &Dataset,
    initial: &Dataset,
    algorithm: Algorithm,
    config: &ClusteringConfig,
) -> Result<ClusteringResult> {
    cluster_with(data, initial, algorithm, config, |_, _| {})
}

/// Runs to convergence, calling `observe` after every iteration.
pub fn cluster_with<F>(
    data: &Dataset,
    initial: &Dataset,
    algorithm: Algorithm,
    config: &ClusteringConfig,
    mut observe: F,
) -> Result<ClusteringResult>
where
    F: FnMut(&IterationStats, &dyn KMeansStep),
{
    let mut step = algorithm.start(data, initial, config)?;
    let mut iterations = Vec::new();
    let mut converged = false;
    for it in 1..=config.max_iterations {
        let start = Instant::now();
        let mut stats = step.step()?;
        stats.wall_time = start.elapsed();
        stats.iteration = it;
        stats.max_movement = step.centroids().max_movement();
        observe(&stats, &*step);
        let done = stats.max_movement <= config.tolerance;
        iterations.push(stats);
        if done {
            converged = true;
            break;
        }
    }
    Ok(ClusteringResult {
        centroids: step.centroids().clone(),
        assignments: step.assignments().to_vec(),
        iterations,
        converged,
    })
}

/// Samples `k` distinct rows uniformly without replacement.
pub fn random_initial_centroids(data: &Dataset, k: usize, seed: u64) -> Result<Dataset> {
    if k == 0 || k > data.len() {
        return usage(format!("cannot sample {k} centroids from {} points", data.len()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let idx = sample(&mut rng, data.len(), k).into_vec();
    data.select(&idx)
}

/// Sum of squared distances from each point to its assigned centroid.
pub fn objective(data: &Dataset, centroids: &CentroidSet, assignments: &[usize]) -> f64 {
    data.rows()
        .zip(assignments)
        .map(|(p, &a)| {
            let d = euclidean(p, centroids.centroid(a));
            d * d
        })
        .sum()
}
