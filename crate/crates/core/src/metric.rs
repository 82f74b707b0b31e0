//! Points, the Euclidean metric, bounding regions, and the node/point
//! distance bounds consumed by the pruning rules.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{usage, Result};

/// A dense row-major N×d matrix of finite coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    values: Vec<f64>,
    dim: usize,
}

impl Dataset {
    /// Builds a dataset from row-major values. Rejects empty input, a zero
    /// dimension, ragged length and non-finite coordinates.
    pub fn new(values: Vec<f64>, dim: usize) -> Result<Self> {
        if dim == 0 {
            return usage("dataset dimension must be at least 1");
        }
        if values.is_empty() {
            return usage("dataset must contain at least one point");
        }
        if !values.len().is_multiple_of(dim) {
            return usage(format!(
                "{} values cannot be split into rows of dimension {dim}",
                values.len()
            ));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return usage(format!(
                "non-finite coordinate at point {}, dimension {}",
                pos / dim,
                pos % dim
            ));
        }
        Ok(Self { values, dim })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let Some(first) = rows.first() else {
            return usage("dataset must contain at least one point");
        };
        let dim = first.as_ref().len();
        let mut values = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != dim {
                return usage(format!("row {i} has {} coordinates, expected {dim}", row.len()));
            }
            values.extend_from_slice(row);
        }
        Self::new(values, dim)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.values.len() / self.dim
    }

    /// Always false: a dataset holds at least one point.
    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.dim)
    }

    /// Copies the given rows, in order, into a new dataset.
    pub fn select(&self, indices: &[usize]) -> Result<Self> {
        let mut values = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            if i >= self.len() {
                return usage(format!("row index {i} out of range for {} rows", self.len()));
            }
            values.extend_from_slice(self.point(i));
        }
        Self::new(values, self.dim)
    }

    pub fn mean(&self) -> Vec<f64> {
        let mut sum = vec![0.0; self.dim];
        for row in self.rows() {
            for (s, v) in sum.iter_mut().zip(row) {
                *s += v;
            }
        }
        let n = self.len() as f64;
        sum.iter_mut().for_each(|s| *s /= n);
        sum
    }
}

/// A metric on points. Only [`Euclidean`] ships; the pruning rules only rely
/// on the triangle inequality.
pub trait Metric {
    fn eval(&self, a: &[f64], b: &[f64]) -> f64;
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Euclidean;

impl Metric for Euclidean {
    #[inline]
    fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        euclidean(a, b)
    }
}

/// Uncounted Euclidean distance. Algorithms go through
/// [`DistanceCounter::distance`] instead.
#[inline]
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let t = x - y;
            t * t
        })
        .sum::<f64>()
        .sqrt()
}

/// Run-scoped tally of point-to-point distance evaluations.
///
/// Each clustering run owns one counter, so independent runs on different
/// threads never share a tally.
#[derive(Debug, Default)]
pub struct DistanceCounter {
    count: AtomicU64,
}

impl DistanceCounter {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn distance(&self, a: &[f64], b: &[f64]) -> f64 {
        self.count.fetch_add(1, Ordering::Relaxed);
        Euclidean.eval(a, b)
    }

    /// Records `n` evaluations performed through [`euclidean`] in a batch.
    #[inline]
    pub fn add(&self, n: u64) {
        self.count.fetch_add(n, Ordering::Relaxed);
    }

    pub fn count(&self) -> u64 {
        self.count.load(Ordering::Relaxed)
    }

    pub fn reset(&self) {
        self.count.store(0, Ordering::Relaxed);
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return usage(format!("dimension mismatch: {a} vs {b}"));
    }
    Ok(())
}

/// Checked Euclidean distance that increments `counter`.
pub fn distance(a: &[f64], b: &[f64], counter: &DistanceCounter) -> Result<f64> {
    check_dims(a.len(), b.len())?;
    Ok(counter.distance(a, b))
}

/// Convex region bounding the descendant points of a tree node.
///
/// A tree uses one variant throughout: boxes for kd-trees, balls for cover
/// trees. Bounds between mixed variants are rejected.
#[derive(Clone, Debug, PartialEq)]
pub enum BoundingRegion {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
}

impl BoundingRegion {
    /// Tightest box around the given points.
    pub fn bounding_box<'a>(dim: usize, points: impl IntoIterator<Item = &'a [f64]>) -> Self {
        let mut lo = vec![f64::INFINITY; dim];
        let mut hi = vec![f64::NEG_INFINITY; dim];
        for p in points {
            for ((l, h), &v) in lo.iter_mut().zip(hi.iter_mut()).zip(p) {
                *l = l.min(v);
                *h = h.max(v);
            }
        }
        BoundingRegion::Box { lo, hi }
    }

    pub fn dim(&self) -> usize {
        match self {
            BoundingRegion::Box { lo, .. } => lo.len(),
            BoundingRegion::Ball { center, .. } => center.len(),
        }
    }

    pub fn min_dist(&self, other: &Self, counter: &DistanceCounter) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        self.min_dist_unchecked(other, counter)
            .map_or_else(|| usage("bounds between a box and a ball are not defined"), Ok)
    }

    pub fn max_dist(&self, other: &Self, counter: &DistanceCounter) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        self.max_dist_unchecked(other, counter)
            .map_or_else(|| usage("bounds between a box and a ball are not defined"), Ok)
    }

    pub fn min_dist_point(&self, p: &[f64], counter: &DistanceCounter) -> Result<f64> {
        check_dims(self.dim(), p.len())?;
        Ok(self.min_dist_point_unchecked(p, counter))
    }

    pub fn max_dist_point(&self, p: &[f64], counter: &DistanceCounter) -> Result<f64> {
        check_dims(self.dim(), p.len())?;
        Ok(self.max_dist_point_unchecked(p, counter))
    }

    /// `None` for mixed variants.
    pub(crate) fn min_dist_unchecked(&self, other: &Self, counter: &DistanceCounter) -> Option<f64> {
        match (self, other) {
            (BoundingRegion::Box { lo: alo, hi: ahi }, BoundingRegion::Box { lo: blo, hi: bhi }) => {
                let mut sum = 0.0;
                for i in 0..alo.len() {
                    let gap = (blo[i] - ahi[i]).max(alo[i] - bhi[i]).max(0.0);
                    sum += gap * gap;
                }
                Some(sum.sqrt())
            }
            (BoundingRegion::Ball { center: ca, radius: ra }, BoundingRegion::Ball { center: cb, radius: rb }) => {
                Some((counter.distance(ca, cb) - ra - rb).max(0.0))
            }
            _ => None,
        }
    }

    pub(crate) fn max_dist_unchecked(&self, other: &Self, counter: &DistanceCounter) -> Option<f64> {
        match (self, other) {
            (BoundingRegion::Box { lo: alo, hi: ahi }, BoundingRegion::Box { lo: blo, hi: bhi }) => {
                let mut sum = 0.0;
                for i in 0..alo.len() {
                    let span = (bhi[i] - alo[i]).max(ahi[i] - blo[i]);
                    sum += span * span;
                }
                Some(sum.sqrt())
            }
            (BoundingRegion::Ball { center: ca, radius: ra }, BoundingRegion::Ball { center: cb, radius: rb }) => {
                Some(counter.distance(ca, cb) + ra + rb)
            }
            _ => None,
        }
    }

    pub(crate) fn min_dist_point_unchecked(&self, p: &[f64], counter: &DistanceCounter) -> f64 {
        match self {
            BoundingRegion::Box { lo, hi } => {
                let mut sum = 0.0;
                for i in 0..lo.len() {
                    let gap = (lo[i] - p[i]).max(p[i] - hi[i]).max(0.0);
                    sum += gap * gap;
                }
                sum.sqrt()
            }
            BoundingRegion::Ball { center, radius } => (counter.distance(center, p) - radius).max(0.0),
        }
    }

    pub(crate) fn max_dist_point_unchecked(&self, p: &[f64], counter: &DistanceCounter) -> f64 {
        match self {
            BoundingRegion::Box { lo, hi } => box_max_dist_point(lo, hi, p),
            BoundingRegion::Ball { center, radius } => counter.distance(center, p) + radius,
        }
    }
}

/// Farthest corner distance from `p` to a box; no point distance involved.
#[inline]
pub(crate) fn box_max_dist_point(lo: &[f64], hi: &[f64], p: &[f64]) -> f64 {
    let mut sum = 0.0;
    for i in 0..lo.len() {
        let span = (p[i] - lo[i]).abs().max((hi[i] - p[i]).abs());
        sum += span * span;
    }
    sum.sqrt()
}

/// Centroid positions with the movement and ownership tallies of their last
/// update.
#[derive(Clone, Debug, PartialEq)]
pub struct CentroidSet {
    positions: Dataset,
    movements: Vec<f64>,
    counts: Vec<usize>,
}

impl CentroidSet {
    pub fn new(positions: Dataset) -> Self {
        let k = positions.len();
        Self {
            positions,
            movements: vec![0.0; k],
            counts: vec![0; k],
        }
    }

    /// Normalises per-cluster coordinate sums into the next centroid set.
    ///
    /// Clusters that own no points keep their previous position and report
    /// zero movement. When `counter` is given, the k movement distances are
    /// tallied on it.
    pub fn from_sums(
        previous: &CentroidSet,
        mut sums: Vec<f64>,
        counts: Vec<usize>,
        counter: Option<&DistanceCounter>,
    ) -> Self {
        let dim = previous.dim();
        let k = previous.k();
        debug_assert_eq!(sums.len(), k * dim);
        debug_assert_eq!(counts.len(), k);
        let mut movements = vec![0.0; k];
        for j in 0..k {
            let row = &mut sums[j * dim..(j + 1) * dim];
            let old = previous.centroid(j);
            if counts[j] == 0 {
                row.copy_from_slice(old);
                continue;
            }
            let n = counts[j] as f64;
            row.iter_mut().for_each(|v| *v /= n);
            movements[j] = match counter {
                Some(c) => c.distance(old, row),
                None => euclidean(old, row),
            };
        }
        Self {
            positions: Dataset { values: sums, dim },
            movements,
            counts,
        }
    }

    #[inline]
    pub fn k(&self) -> usize {
        self.positions.len()
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.positions.dim()
    }

    #[inline]
    pub fn centroid(&self, j: usize) -> &[f64] {
        self.positions.point(j)
    }

    pub fn positions(&self) -> &Dataset {
        &self.positions
    }

    pub fn movements(&self) -> &[f64] {
        &self.movements
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn max_movement(&self) -> f64 {
        self.movements.iter().copied().fold(0.0, f64::max)
    }
}
