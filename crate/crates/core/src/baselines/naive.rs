use super::{next_centroids, scan};
use crate::error::{usage, Result};
use crate::harness::IterationStats;
use crate::kmeans::KMeansStep;
use crate::metric::{CentroidSet, Dataset, DistanceCounter};
use crate::par::{for_each_mut_sum, Execution};

/// Brute-force Lloyd: k·N distances per iteration.
pub struct Naive<'a> {
    data: &'a Dataset,
    centroids: CentroidSet,
    assignments: Vec<usize>,
    exec: Execution,
    counter: DistanceCounter,
}

impl<'a> Naive<'a> {
    pub fn new(data: &'a Dataset, centroids: CentroidSet, exec: Execution) -> Self {
        Self {
            data,
            centroids,
            assignments: vec![0; data.len()],
            exec,
            counter: DistanceCounter::new(),
        }
    }
}

impl KMeansStep for Naive<'_> {
    fn step(&mut self) -> Result<IterationStats> {
        let (data, centroids) = (self.data, &self.centroids);
        for_each_mut_sum(self.exec, &mut self.assignments, |i, a| {
            *a = scan(data.point(i), centroids).0;
            0
        });
        let n = (data.len() * centroids.k()) as u64;
        self.counter.add(n);
        self.centroids = next_centroids(self.exec, data, &self.assignments, centroids, None);
        Ok(IterationStats {
            distance_calcs: n,
            ..IterationStats::default()
        })
    }

    fn centroids(&self) -> &CentroidSet {
        &self.centroids
    }

    fn assignments(&self) -> &[usize] {
        &self.assignments
    }
}

/// One Lloyd iteration: returns the moved centroids, the assignments and the
/// number of distances evaluated.
pub fn lloyd_iteration(data: &Dataset, centroids: &CentroidSet) -> Result<(CentroidSet, Vec<usize>, u64)> {
    if data.dim() != centroids.dim() {
        return usage(format!(
            "dimension mismatch: data {} vs centroids {}",
            data.dim(),
            centroids.dim()
        ));
    }
    let mut n = Naive::new(data, centroids.clone(), Execution::Sequential);
    let stats = n.step()?;
    Ok((n.centroids, n.assignments, stats.distance_calcs))
}
