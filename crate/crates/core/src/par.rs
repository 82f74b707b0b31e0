//! Data-parallel helpers for the per-point loops of the flat algorithms.
//!
//! Without the `parallel` feature every helper runs sequentially, and
//! [`Execution::Parallel`] quietly degrades to the same code path.

use crate::metric::Dataset;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Execution {
    Sequential,
    #[default]
    Parallel,
}

impl Execution {
    #[cfg(feature = "parallel")]
    #[inline]
    fn parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Execution::Parallel
    }
}

/// Rows per accumulation chunk. Fixed so that partial sums combine in the
/// same order whatever the thread count.
const CHUNK: usize = 4096;

/// Applies `f` to every element and returns the sum of its results.
pub fn for_each_mut_sum<T, F>(exec: Execution, items: &mut [T], f: F) -> u64
where
    T: Send,
    F: Fn(usize, &mut T) -> u64 + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.parallel() {
        use rayon::prelude::*;
        return items.par_iter_mut().enumerate().map(|(i, t)| f(i, t)).sum();
    }
    let _ = exec;
    items.iter_mut().enumerate().map(|(i, t)| f(i, t)).sum()
}

/// Like [`for_each_mut_sum`], pairing element `i` of `a` with the `i`-th
/// `width`-sized chunk of `b`.
pub fn zip_chunks_mut_sum<A, B, F>(exec: Execution, a: &mut [A], b: &mut [B], width: usize, f: F) -> u64
where
    A: Send,
    B: Send,
    F: Fn(usize, &mut A, &mut [B]) -> u64 + Sync + Send,
{
    debug_assert_eq!(a.len() * width, b.len());
    #[cfg(feature = "parallel")]
    if exec.parallel() {
        use rayon::prelude::*;
        return a
            .par_iter_mut()
            .zip(b.par_chunks_mut(width))
            .enumerate()
            .map(|(i, (x, y))| f(i, x, y))
            .sum();
    }
    let _ = exec;
    a.iter_mut()
        .zip(b.chunks_mut(width))
        .enumerate()
        .map(|(i, (x, y))| f(i, x, y))
        .sum()
}

/// Collects `f(0..n)` in index order.
pub fn map_collect<T, F>(exec: Execution, n: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    #[cfg(feature = "parallel")]
    if exec.parallel() {
        use rayon::prelude::*;
        return (0..n).into_par_iter().map(f).collect();
    }
    let _ = exec;
    (0..n).map(f).collect()
}

/// Per-cluster coordinate sums and counts for an assignment vector.
///
/// The result is bit-identical between sequential and parallel execution.
pub fn accumulate(exec: Execution, data: &Dataset, assignments: &[usize], k: usize) -> (Vec<f64>, Vec<usize>) {
    let dim = data.dim();
    let chunks = assignments.len().div_ceil(CHUNK);
    let partial = |c: usize| {
        let mut sums = vec![0.0; k * dim];
        let mut counts = vec![0usize; k];
        let lo = c * CHUNK;
        let hi = (lo + CHUNK).min(assignments.len());
        for (i, &a) in assignments.iter().enumerate().take(hi).skip(lo) {
            counts[a] += 1;
            let row = &mut sums[a * dim..(a + 1) * dim];
            for (s, v) in row.iter_mut().zip(data.point(i)) {
                *s += v;
            }
        }
        (sums, counts)
    };
    let parts = map_collect(exec, chunks, partial);
    let mut sums = vec![0.0; k * dim];
    let mut counts = vec![0usize; k];
    for (s, c) in parts {
        for (a, b) in sums.iter_mut().zip(&s) {
            *a += b;
        }
        for (a, b) in counts.iter_mut().zip(&c) {
            *a += b;
        }
    }
    (sums, counts)
}
