/// Sentinel for "no owner known".
pub const INVALID: usize = usize::MAX;

/// Per-node k-means bookkeeping.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NodeState {
    /// Upper bound on the distance from any descendant to `closest`.
    pub ub: f64,
    /// Lower bound on the distance from any descendant to any pruned centroid.
    pub lb: f64,
    /// Number of centroids proven not to own any descendant this pass.
    pub pruned: usize,
    pub closest: usize,
    /// False once every descendant's owner is proven fixed for the next
    /// iteration.
    pub canchange: bool,
    pub visited: bool,
}

impl NodeState {
    pub fn fresh() -> Self {
        Self {
            ub: f64::INFINITY,
            lb: f64::INFINITY,
            pruned: 0,
            closest: INVALID,
            canchange: true,
            visited: false,
        }
    }

    /// Pruned every centroid but `closest`.
    #[inline]
    pub fn owned(&self, k: usize) -> bool {
        self.pruned + 1 == k && self.closest != INVALID
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PointState {
    pub ub: f64,
    pub lb: f64,
    pub closest: usize,
    pub canchange: bool,
}

impl PointState {
    pub fn fresh() -> Self {
        Self {
            ub: f64::INFINITY,
            lb: f64::INFINITY,
            closest: INVALID,
            canchange: true,
        }
    }
}

/// Traversal log entries recorded when instrumentation is on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Event {
    /// First visit of `query` this pass, copying `pruned` from `parent`.
    Inherit {
        query: usize,
        parent: Option<usize>,
        pruned: usize,
    },
    /// `query` excluded every centroid under centroid-tree node `reference`.
    Prune {
        query: usize,
        reference: usize,
        count: usize,
    },
    /// After the traversal, `parent`'s prunes made since `query`'s first
    /// visit were added to `query`.
    Propagate { query: usize, parent: usize, count: usize },
}
