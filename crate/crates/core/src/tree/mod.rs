//! Space trees over a dataset: kd-trees and cover trees, a generic dual
//! depth-first traversal, and structural diagnostics.

mod cover;
mod dump;
mod kd;
pub mod traversal;
mod validate;

pub use traversal::{dual_depth_first, TraversalRules, TraversalStats, TreeView};

use crate::error::{usage, Result};
use crate::metric::{BoundingRegion, Dataset, DistanceCounter};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum TreeKind {
    Kd,
    Cover,
}

#[derive(Clone, Debug, PartialEq)]
pub struct TreeNode {
    pub region: BoundingRegion,
    pub children: Vec<usize>,
    pub parent: Option<usize>,
    /// Descendant points are `perm[start..end]` of the owning tree.
    pub start: usize,
    pub end: usize,
    pub descendant_mean: Vec<f64>,
    /// Cover-tree scale; `None` is a leaf at scale −∞ (and every kd node).
    pub scale: Option<i32>,
}

impl TreeNode {
    #[inline]
    pub fn descendant_count(&self) -> usize {
        self.end - self.start
    }

    #[inline]
    pub fn is_leaf(&self) -> bool {
        self.children.is_empty()
    }
}

/// Parent links, ordered child lists and root of a hierarchy over node ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    pub root: usize,
    pub parent: Vec<Option<usize>>,
    pub children: Vec<Vec<usize>>,
}

/// A tree on a dataset. Nodes are stored in pre-order with the root at 0.
///
/// Descendant sets of siblings are disjoint and every node's descendants are
/// contiguous in [`SpaceTree::perm`]. Only leaves hold points: a kd leaf
/// holds its bucket, a cover leaf holds its point and any exact duplicates.
#[derive(Clone, Debug)]
pub struct SpaceTree {
    kind: TreeKind,
    dim: usize,
    nodes: Vec<TreeNode>,
    perm: Vec<usize>,
}

impl SpaceTree {
    /// kd-tree with at most `leaf_size` points per leaf.
    pub fn kd(data: &Dataset, leaf_size: usize) -> Result<Self> {
        if leaf_size == 0 {
            return usage("leaf size must be at least 1");
        }
        Ok(kd::build(data, leaf_size))
    }

    pub fn cover(data: &Dataset) -> Result<Self> {
        Ok(cover::build(data, &DistanceCounter::new()))
    }

    /// Cover tree whose construction distances are tallied on `counter`.
    pub fn cover_counted(data: &Dataset, counter: &DistanceCounter) -> Self {
        cover::build(data, counter)
    }

    pub fn build(data: &Dataset, kind: TreeKind, leaf_size: usize) -> Result<Self> {
        match kind {
            TreeKind::Kd => Self::kd(data, leaf_size),
            TreeKind::Cover => Self::cover(data),
        }
    }

    pub(crate) fn from_parts(kind: TreeKind, dim: usize, nodes: Vec<TreeNode>, perm: Vec<usize>) -> Self {
        Self { kind, dim, nodes, perm }
    }

    pub fn kind(&self) -> TreeKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn root(&self) -> usize {
        0
    }

    #[inline]
    pub fn node(&self, i: usize) -> &TreeNode {
        &self.nodes[i]
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    #[inline]
    pub fn descendant_points(&self, i: usize) -> &[usize] {
        let n = &self.nodes[i];
        &self.perm[n.start..n.end]
    }

    #[inline]
    pub fn held_points(&self, i: usize) -> &[usize] {
        if self.nodes[i].is_leaf() {
            self.descendant_points(i)
        } else {
            &[]
        }
    }

    /// A fixed descendant point: the first in `perm` order. For cover trees
    /// this is the node's own point.
    #[inline]
    pub fn representative(&self, i: usize) -> usize {
        self.perm[self.nodes[i].start]
    }

    pub fn depth(&self) -> usize {
        let mut depth = vec![0usize; self.nodes.len()];
        let mut max = 0;
        for i in 1..self.nodes.len() {
            let p = self.nodes[i].parent.expect("non-root node has a parent");
            depth[i] = depth[p] + 1;
            max = max.max(depth[i]);
        }
        max
    }

    pub fn topology(&self) -> Topology {
        Topology {
            root: 0,
            parent: self.nodes.iter().map(|n| n.parent).collect(),
            children: self.nodes.iter().map(|n| n.children.clone()).collect(),
        }
    }

    /// Total number of skipped scale levels. Defined for cover trees only.
    pub fn imbalance(&self) -> Result<u64> {
        if self.kind != TreeKind::Cover {
            return usage("imbalance is only defined for cover trees");
        }
        let s_min = self.nodes.iter().filter_map(|n| n.scale).min();
        let mut total = 0i64;
        for n in &self.nodes[1..] {
            let sp = self.nodes[n.parent.expect("non-root")]
                .scale
                .expect("parents have a scale") as i64;
            total += match n.scale {
                Some(s) => sp - s as i64 - 1,
                None => (sp - s_min.expect("a parent exists") as i64 - 1).max(0),
            };
        }
        Ok(total as u64)
    }

    /// Indented text listing of every node.
    pub fn dump(&self) -> String {
        dump::render(self)
    }

    /// Checks structure, containment, cached statistics and, for cover trees,
    /// nesting, covering and separation. Exhaustive; meant for tests and
    /// debugging.
    pub fn validate(&self, data: &Dataset) -> std::result::Result<(), String> {
        validate::check(self, data)
    }
}

impl TreeView for SpaceTree {
    #[inline]
    fn root(&self) -> usize {
        0
    }

    #[inline]
    fn children(&self, node: usize) -> &[usize] {
        &self.nodes[node].children
    }

    #[inline]
    fn points(&self, node: usize) -> &[usize] {
        self.held_points(node)
    }
}

/// Mean of the listed rows.
pub(crate) fn mean_of(data: &Dataset, idx: &[usize]) -> Vec<f64> {
    let mut m = vec![0.0; data.dim()];
    for &i in idx {
        for (a, b) in m.iter_mut().zip(data.point(i)) {
            *a += b;
        }
    }
    let n = idx.len() as f64;
    m.iter_mut().for_each(|v| *v /= n);
    m
}

/// Count-weighted mean of the children's cached means.
pub(crate) fn mean_of_children(nodes: &[TreeNode], children: &[usize], dim: usize) -> Vec<f64> {
    let mut m = vec![0.0; dim];
    let mut total = 0usize;
    for &c in children {
        let n = nodes[c].descendant_count();
        total += n;
        for (a, b) in m.iter_mut().zip(&nodes[c].descendant_mean) {
            *a += b * n as f64;
        }
    }
    m.iter_mut().for_each(|v| *v /= total as f64);
    m
}
