//! Dual-tree k-means: a tree on the points and a fresh tree on the centroids
//! each iteration, pruned with per-node and per-point bounds.
//!
//! One iteration coalesces away frozen subtrees, runs a pruning dual
//! traversal to find owners, recomputes centroids from whole owned nodes
//! where possible, and then moves every bound by the centroid movements to
//! decide what freezes for the next iteration.

mod coalesce;
mod rules;
mod state;
mod update;

pub use coalesce::{coalesce, decoalesce, Coalesced};
pub use rules::{base_case, rescore, score, RefNode};
pub use state::{Event, NodeState, PointState, INVALID};
pub use update::{centroid_nn, update_centroids, update_tree};

use crate::error::Result;
use crate::harness::IterationStats;
use crate::kmeans::KMeansStep;
use crate::metric::{CentroidSet, Dataset, DistanceCounter};
use crate::tree::{dual_depth_first, SpaceTree, TreeKind};

/// Counts from one dual traversal.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PassStats {
    pub scores: u64,
    pub base_cases: u64,
    pub visible_nodes: usize,
}

/// Dual-tree k-means run state over one dataset.
pub struct DualTree<'a> {
    data: &'a Dataset,
    tree: SpaceTree,
    centroids: CentroidSet,
    nodes: Vec<NodeState>,
    points: Vec<PointState>,
    assignments: Vec<usize>,
    counter: DistanceCounter,
    events: Option<Vec<Event>>,
}

impl<'a> DualTree<'a> {
    /// Builds the point tree of the given kind; `leaf_size` applies to kd.
    pub fn new(data: &'a Dataset, centroids: CentroidSet, kind: TreeKind, leaf_size: usize) -> Result<Self> {
        let tree = SpaceTree::build(data, kind, leaf_size)?;
        Ok(Self {
            data,
            nodes: vec![NodeState::fresh(); tree.node_count()],
            points: vec![PointState::fresh(); data.len()],
            assignments: vec![0; data.len()],
            tree,
            centroids,
            counter: DistanceCounter::new(),
            events: None,
        })
    }

    pub fn tree(&self) -> &SpaceTree {
        &self.tree
    }

    pub fn node_states(&self) -> &[NodeState] {
        &self.nodes
    }

    pub fn point_states(&self) -> &[PointState] {
        &self.points
    }

    pub fn distance_count(&self) -> u64 {
        self.counter.count()
    }

    /// Keeps a log of inheritances and prunes for each pass.
    pub fn record_events(&mut self, on: bool) {
        self.events = on.then(Vec::new);
    }

    /// Log of the most recent pass, if recording.
    pub fn events(&self) -> &[Event] {
        self.events.as_deref().unwrap_or(&[])
    }

    fn centroid_tree(&self) -> SpaceTree {
        match self.tree.kind() {
            TreeKind::Kd => SpaceTree::kd(self.centroids.positions(), 1).expect("leaf size 1 is valid"),
            TreeKind::Cover => SpaceTree::cover_counted(self.centroids.positions(), &self.counter),
        }
    }

    /// Ownership pass over the coalesced tree against the current centroids.
    pub fn run_pass(&mut self) -> PassStats {
        let view = coalesce(&self.tree, &self.nodes);
        let ctree = self.centroid_tree();
        for s in &mut self.nodes {
            s.visited = false;
        }
        if let Some(ev) = &mut self.events {
            ev.clear();
        }
        let mut rules = rules::Rules {
            qt: &self.tree,
            view: &view,
            rt: &ctree,
            data: self.data,
            centroids: &self.centroids,
            nodes: &mut self.nodes,
            points: &mut self.points,
            counter: &self.counter,
            events: self.events.as_mut(),
            base_cases: 0,
            inherited: vec![0; self.tree.node_count()],
        };
        let t = dual_depth_first(&view, &ctree, &mut rules);
        rules.propagate();
        PassStats {
            scores: t.scores,
            base_cases: rules.base_cases,
            visible_nodes: view.node_count(),
        }
    }

    /// Moves the centroids from the pass results and updates every bound.
    pub fn finish_iteration(&mut self) {
        let next = update_centroids(
            &self.tree,
            self.data,
            &self.nodes,
            &self.points,
            &self.centroids,
            &mut self.assignments,
            &self.counter,
        );
        let nn = centroid_nn(&next, &self.counter);
        update_tree(
            &self.tree,
            self.data,
            &next,
            &nn,
            &mut self.nodes,
            &mut self.points,
            &self.counter,
        );
        self.centroids = next;
    }

    /// Nodes of the view the next pass will traverse.
    pub fn coalesced(&self) -> Coalesced<'_> {
        coalesce(&self.tree, &self.nodes)
    }
}

impl KMeansStep for DualTree<'_> {
    fn step(&mut self) -> Result<IterationStats> {
        let before = self.counter.count();
        let pass = self.run_pass();
        self.finish_iteration();
        Ok(IterationStats {
            distance_calcs: self.counter.count() - before,
            base_cases: pass.base_cases,
            scores: pass.scores,
            nodes_in_coalesced_tree: pass.visible_nodes,
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
