//! Instrumentation: per-iteration statistics, synthetic datasets, tracked
//! allocation and Table-style experiment reports.

mod experiment;
mod memory;
mod synthetic;

pub use experiment::{run_experiment, Cell, CellStatus, ExperimentConfig, Report};
pub use memory::{measure_peak, tracking_installed, TrackingAllocator};
pub use synthetic::{generate, Generator, SyntheticSpec};

use serde::{Serialize, Serializer};
use std::time::Duration;

/// Counters for one k-means iteration.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct IterationStats {
    /// 1-based.
    pub iteration: usize,
    pub distance_calcs: u64,
    pub base_cases: u64,
    pub scores: u64,
    pub nodes_in_coalesced_tree: usize,
    pub max_movement: f64,
    #[serde(rename = "wall_time_ms", serialize_with = "millis")]
    pub wall_time: Duration,
}

fn millis<S: Serializer>(d: &Duration, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64() * 1e3)
}
