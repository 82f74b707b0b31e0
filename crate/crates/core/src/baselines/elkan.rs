use super::next_centroids;
use crate::error::{Error, Result};
use crate::harness::IterationStats;
use crate::kmeans::KMeansStep;
use crate::metric::{euclidean, CentroidSet, Dataset, DistanceCounter};
use crate::par::{zip_chunks_mut_sum, Execution};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ElkanState {
    pub owner: usize,
    pub upper: f64,
}

/// Elkan's algorithm: one lower bound per (point, centroid) pair.
pub struct Elkan<'a> {
    data: &'a Dataset,
    centroids: CentroidSet,
    states: Vec<ElkanState>,
    /// Row-major N×k lower bounds.
    lower: Vec<f64>,
    assignments: Vec<usize>,
    first: bool,
    exec: Execution,
    counter: DistanceCounter,
}

impl<'a> Elkan<'a> {
    /// Fails with [`Error::OutOfMemory`] when the k·N bound table cannot be
    /// allocated.
    pub fn new(data: &'a Dataset, centroids: CentroidSet, exec: Execution) -> Result<Self> {
        let len = data.len().checked_mul(centroids.k()).ok_or(Error::OutOfMemory {
            what: "elkan lower bounds",
            bytes: usize::MAX,
        })?;
        let mut lower = Vec::new();
        lower.try_reserve_exact(len).map_err(|_| Error::OutOfMemory {
            what: "elkan lower bounds",
            bytes: len.saturating_mul(8),
        })?;
        lower.resize(len, 0.0);
        Ok(Self {
            data,
            centroids,
            states: vec![
                ElkanState {
                    owner: 0,
                    upper: f64::INFINITY
                };
                data.len()
            ],
            lower,
            assignments: vec![0; data.len()],
            first: true,
            exec,
            counter: DistanceCounter::new(),
        })
    }

    pub fn states(&self) -> &[ElkanState] {
        &self.states
    }

    pub fn lower_bounds(&self) -> &[f64] {
        &self.lower
    }
}

impl KMeansStep for Elkan<'_> {
    fn step(&mut self) -> Result<IterationStats> {
        let before = self.counter.count();
        let (data, c, first) = (self.data, &self.centroids, self.first);
        let k = c.k();

        // Inter-centroid distances and half the nearest-other distance.
        let mut cc = vec![0.0; k * k];
        let mut half_nn = vec![f64::INFINITY; k];
        if !first {
            for i in 0..k {
                for j in i + 1..k {
                    let d = self.counter.distance(c.centroid(i), c.centroid(j));
                    cc[i * k + j] = d;
                    cc[j * k + i] = d;
                    half_nn[i] = half_nn[i].min(d / 2.0);
                    half_nn[j] = half_nn[j].min(d / 2.0);
                }
            }
        }

        let evaluated = zip_chunks_mut_sum(self.exec, &mut self.states, &mut self.lower, k, |i, s, lower| {
            let x = data.point(i);
            if first {
                let mut best = (0, f64::INFINITY);
                for (j, l) in lower.iter_mut().enumerate() {
                    let d = euclidean(x, c.centroid(j));
                    *l = d;
                    if d < best.1 {
                        best = (j, d);
                    }
                }
                *s = ElkanState {
                    owner: best.0,
                    upper: best.1,
                };
                return k as u64;
            }
            if s.upper < half_nn[s.owner] {
                return 0;
            }
            let mut n = 0;
            let mut stale = true;
            for j in 0..k {
                if j == s.owner {
                    continue;
                }
                let skip = |s: &ElkanState, l: f64| s.upper < l || s.upper < cc[s.owner * k + j] / 2.0;
                if skip(s, lower[j]) {
                    continue;
                }
                if stale {
                    s.upper = euclidean(x, c.centroid(s.owner));
                    lower[s.owner] = s.upper;
                    n += 1;
                    stale = false;
                    if skip(s, lower[j]) {
                        continue;
                    }
                }
                let d = euclidean(x, c.centroid(j));
                n += 1;
                lower[j] = d;
                if d < s.upper || (d == s.upper && j < s.owner) {
                    s.owner = j;
                    s.upper = d;
                }
            }
            n
        });
        self.counter.add(evaluated);
        self.first = false;
        for (a, s) in self.assignments.iter_mut().zip(&self.states) {
            *a = s.owner;
        }

        let next = next_centroids(self.exec, data, &self.assignments, c, Some(&self.counter));
        let m = next.movements();
        zip_chunks_mut_sum(self.exec, &mut self.states, &mut self.lower, k, |_, s, lower| {
            for (l, mj) in lower.iter_mut().zip(m) {
                *l = (*l - mj).max(0.0);
            }
            s.upper += m[s.owner];
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

/// One Elkan iteration on a fresh state: identical to a cold start.
pub fn elkan_iteration(data: &Dataset, centroids: &CentroidSet) -> Result<(CentroidSet, Vec<usize>, u64)> {
    let mut e = Elkan::new(data, centroids.clone(), Execution::Sequential)?;
    let stats = e.step()?;
    Ok((e.centroids, e.assignments, stats.distance_calcs))
}
