//! Exact flat k-means algorithms: naive Lloyd, Hamerly and Elkan.
//!
//! They share the centroid update, the empty-cluster rule and the
//! lowest-index tie-break with the dual-tree algorithm, so all of them
//! produce the same assignment at every iteration.

mod elkan;
mod hamerly;
mod naive;

pub use elkan::{elkan_iteration, Elkan, ElkanState};
pub use hamerly::{hamerly_iteration, Hamerly, HamerlyCarry, HamerlyState};
pub use naive::{lloyd_iteration, Naive};

use crate::metric::{euclidean, CentroidSet, Dataset, DistanceCounter};
use crate::par::{accumulate, Execution};

/// Nearest and second-nearest centroid distances by full scan. Ties go to
/// the lower index. Not counted.
#[inline]
pub(crate) fn scan(x: &[f64], centroids: &CentroidSet) -> (usize, f64, f64) {
    scan_known(x, centroids, None)
}

/// [`scan`] reusing an already computed distance to one centroid.
#[inline]
pub(crate) fn scan_known(x: &[f64], centroids: &CentroidSet, known: Option<(usize, f64)>) -> (usize, f64, f64) {
    let (mut best, mut d1, mut d2) = (0, f64::INFINITY, f64::INFINITY);
    for j in 0..centroids.k() {
        let d = match known {
            Some((i, d)) if i == j => d,
            _ => euclidean(x, centroids.centroid(j)),
        };
        if d < d1 {
            d2 = d1;
            d1 = d;
            best = j;
        } else if d < d2 {
            d2 = d;
        }
    }
    (best, d1, d2)
}

pub(crate) fn next_centroids(
    exec: Execution,
    data: &Dataset,
    assignments: &[usize],
    old: &CentroidSet,
    counter: Option<&DistanceCounter>,
) -> CentroidSet {
    let (sums, counts) = accumulate(exec, data, assignments, old.k());
    CentroidSet::from_sums(old, sums, counts, counter)
}
