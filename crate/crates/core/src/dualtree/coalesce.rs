//! Coalesced views that hide subtrees whose owners cannot change.

use super::state::{NodeState, INVALID};
use crate::tree::{SpaceTree, Topology, TreeView};

/// A tree with frozen children hidden and single-child chains spliced out.
/// The underlying tree is never modified.
#[derive(Clone, Debug)]
pub struct Coalesced<'a> {
    tree: &'a SpaceTree,
    parent: Vec<usize>,
    range: Vec<(u32, u32)>,
    flat: Vec<usize>,
    visible: usize,
}

/// Hides every child whose `canchange` flag is false. A non-root node left
/// with exactly one visible child is replaced by that child.
pub fn coalesce<'a>(tree: &'a SpaceTree, states: &[NodeState]) -> Coalesced<'a> {
    let n = tree.node_count();
    let mut c = Coalesced {
        tree,
        parent: vec![INVALID; n],
        range: vec![(0, 0); n],
        flat: Vec::with_capacity(n),
        visible: 0,
    };
    let mut stack = Vec::new();
    resolve(tree, states, tree.root(), &mut c, &mut stack);
    c
}

/// The original topology, which the view never alters.
pub fn decoalesce(tree: &SpaceTree) -> Topology {
    tree.topology()
}

fn resolve(tree: &SpaceTree, states: &[NodeState], n: usize, c: &mut Coalesced<'_>, stack: &mut Vec<usize>) -> usize {
    let base = stack.len();
    for &child in &tree.node(n).children {
        if states[child].canchange {
            let r = resolve(tree, states, child, c, stack);
            stack.push(r);
        }
    }
    let count = stack.len() - base;
    if count == 1 && n != tree.root() {
        return stack.pop().expect("one child");
    }
    let start = c.flat.len();
    for &kid in &stack[base..] {
        c.parent[kid] = n;
    }
    c.flat.extend(stack.drain(base..));
    c.range[n] = (start as u32, count as u32);
    c.visible += 1;
    n
}

impl Coalesced<'_> {
    #[inline]
    pub fn parent(&self, node: usize) -> Option<usize> {
        match self.parent[node] {
            INVALID => None,
            p => Some(p),
        }
    }

    /// Number of nodes reachable in the view.
    pub fn node_count(&self) -> usize {
        self.visible
    }

    /// Topology of the visible nodes; hidden ones have no parent or children.
    pub fn topology(&self) -> Topology {
        let n = self.parent.len();
        Topology {
            root: self.tree.root(),
            parent: (0..n).map(|i| self.parent(i)).collect(),
            children: (0..n).map(|i| self.children(i).to_vec()).collect(),
        }
    }
}

impl TreeView for Coalesced<'_> {
    #[inline]
    fn root(&self) -> usize {
        self.tree.root()
    }

    #[inline]
    fn children(&self, node: usize) -> &[usize] {
        let (s, l) = self.range[node];
        &self.flat[s as usize..(s + l) as usize]
    }

    #[inline]
    fn points(&self, node: usize) -> &[usize] {
        self.tree.held_points(node)
    }
}
