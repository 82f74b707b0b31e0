use super::{next_centroids, scan_known};
use crate::dualtree::centroid_nn;
use crate::error::Result;
use crate::harness::IterationStats;
use crate::kmeans::KMeansStep;
use crate::metric::{euclidean, CentroidSet, Dataset, DistanceCounter};
use crate::par::{for_each_mut_sum, Execution};

/// Per-point bounds: upper to the owner, one lower to every other centroid.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamerlyState {
    pub owner: usize,
    pub upper: f64,
    pub lower: f64,
}

/// Hamerly's algorithm: Θ(N) bound storage.
pub struct Hamerly<'a> {
    data: &'a Dataset,
    centroids: CentroidSet,
    states: Vec<HamerlyState>,
    /// Half the distance from each centroid to its nearest other centroid.
    half_nn: Vec<f64>,
    assignments: Vec<usize>,
    first: bool,
    exec: Execution,
    counter: DistanceCounter,
}

impl<'a> Hamerly<'a> {
    pub fn new(data: &'a Dataset, centroids: CentroidSet, exec: Execution) -> Self {
        let init = HamerlyState {
            owner: 0,
            upper: f64::INFINITY,
            lower: 0.0,
        };
        Self {
            data,
            half_nn: vec![0.0; centroids.k()],
            centroids,
            states: vec![init; data.len()],
            assignments: vec![0; data.len()],
            first: true,
            exec,
            counter: DistanceCounter::new(),
        }
    }

    pub fn states(&self) -> &[HamerlyState] {
        &self.states
    }
}

impl KMeansStep for Hamerly<'_> {
    fn step(&mut self) -> Result<IterationStats> {
        let before = self.counter.count();
        let (data, c, half_nn, first) = (self.data, &self.centroids, &self.half_nn, self.first);
        let k = c.k() as u64;
        let evaluated = for_each_mut_sum(self.exec, &mut self.states, |i, s| {
            let x = data.point(i);
            let mut known = None;
            if !first {
                let z = half_nn[s.owner].max(s.lower);
                if s.upper < z {
                    return 0;
                }
                s.upper = euclidean(x, c.centroid(s.owner));
                if s.upper < z {
                    return 1;
                }
                known = Some((s.owner, s.upper));
            }
            let (a, d1, d2) = scan_known(x, c, known);
            *s = HamerlyState {
                owner: a,
                upper: d1,
                lower: d2,
            };
            k
        });
        self.counter.add(evaluated);
        self.first = false;
        for (a, s) in self.assignments.iter_mut().zip(&self.states) {
            *a = s.owner;
        }

        let next = next_centroids(self.exec, data, &self.assignments, c, Some(&self.counter));
        self.half_nn = centroid_nn(&next, &self.counter).into_iter().map(|d| d / 2.0).collect();
        let (m, big) = (next.movements().to_vec(), next.max_movement());
        for_each_mut_sum(self.exec, &mut self.states, |_, s| {
            s.upper += m[s.owner];
            s.lower -= big;
            0
        });
        self.centroids = next;
        Ok(IterationStats {
            distance_calcs: self.counter.count() - before,
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

/// Point states and half nearest-centroid distances carried between calls.
pub type HamerlyCarry = (Vec<HamerlyState>, Vec<f64>);

/// One Hamerly iteration from explicit state; `state` is `None` on a cold
/// start. Returns the moved centroids, the assignments, the distance count
/// and the state for the next call.
pub fn hamerly_iteration(
    data: &Dataset,
    centroids: &CentroidSet,
    state: Option<HamerlyCarry>,
) -> Result<(CentroidSet, Vec<usize>, u64, HamerlyCarry)> {
    let mut h = Hamerly::new(data, centroids.clone(), Execution::Sequential);
    if let Some((states, half_nn)) = state {
        h.states = states;
        h.half_nn = half_nn;
        h.first = false;
    }
    let stats = h.step()?;
    Ok((h.centroids, h.assignments, stats.distance_calcs, (h.states, h.half_nn)))
}
