//! Centroid recomputation from the traversal's ownership results, and the
//! between-iteration bound update that decides which subtrees freeze.

use super::state::{NodeState, PointState, INVALID};
use crate::metric::{CentroidSet, Dataset, DistanceCounter};
use crate::tree::SpaceTree;

/// Distance from each centroid to its nearest other centroid; `+∞` when
/// there is only one. Counts k(k−1)/2 distances.
pub fn centroid_nn(centroids: &CentroidSet, counter: &DistanceCounter) -> Vec<f64> {
    let k = centroids.k();
    let mut nn = vec![f64::INFINITY; k];
    for i in 0..k {
        for j in i + 1..k {
            let d = counter.distance(centroids.centroid(i), centroids.centroid(j));
            nn[i] = nn[i].min(d);
            nn[j] = nn[j].min(d);
        }
    }
    nn
}

/// Sums owned points into their centroids and records each point's owner.
///
/// A node whose every other centroid was pruned contributes its cached
/// mean weighted by its count; other points contribute themselves.
pub fn update_centroids(
    tree: &SpaceTree,
    data: &Dataset,
    nodes: &[NodeState],
    points: &[PointState],
    old: &CentroidSet,
    assignments: &mut [usize],
    counter: &DistanceCounter,
) -> CentroidSet {
    let (k, dim) = (old.k(), old.dim());
    let mut sums = vec![0.0; k * dim];
    let mut counts = vec![0usize; k];
    let mut stack = vec![tree.root()];
    while let Some(n) = stack.pop() {
        let node = tree.node(n);
        if nodes[n].owned(k) {
            let j = nodes[n].closest;
            let c = node.descendant_count();
            counts[j] += c;
            for (s, m) in sums[j * dim..(j + 1) * dim].iter_mut().zip(&node.descendant_mean) {
                *s += c as f64 * m;
            }
            for &p in tree.descendant_points(n) {
                assignments[p] = j;
            }
        } else if node.is_leaf() {
            for &p in tree.held_points(n) {
                let j = points[p].closest;
                debug_assert_ne!(j, INVALID, "point {p} has no owner");
                counts[j] += 1;
                for (s, x) in sums[j * dim..(j + 1) * dim].iter_mut().zip(data.point(p)) {
                    *s += x;
                }
                assignments[p] = j;
            }
        } else {
            stack.extend(node.children.iter().rev());
        }
    }
    CentroidSet::from_sums(old, sums, counts, Some(counter))
}

/// Bounds valid against every centroid: `ub` to owner `j`, `lb` to all others.
#[derive(Clone, Copy, Debug)]
struct Owned {
    j: usize,
    ub: f64,
    lb: f64,
}

#[derive(Clone, Copy, Debug)]
struct Ctx {
    /// Post-update bounds of a frozen ancestor.
    frozen: Option<Owned>,
    /// Pre-update bounds of the nearest owned ancestor.
    above: Option<Owned>,
    /// Minimum pass lower bound over visited ancestors.
    path_lb: f64,
}

pub(super) struct TreeUpdate<'a> {
    pub tree: &'a SpaceTree,
    pub data: &'a Dataset,
    pub centroids: &'a CentroidSet,
    pub nn: &'a [f64],
    pub nodes: &'a mut [NodeState],
    pub points: &'a mut [PointState],
    pub counter: &'a DistanceCounter,
    pub max_movement: f64,
}

/// Loosens, tightens and freezes bounds after the centroids moved.
///
/// Owned nodes and points freeze when the upper bound to their owner stays
/// below a lower bound on every other centroid, using both the moved pass
/// bound and half the owner's nearest-centroid distance. Mobile points are
/// reset to infinite bounds for the next traversal; mobile nodes forget
/// their pruned count.
pub fn update_tree(
    tree: &SpaceTree,
    data: &Dataset,
    centroids: &CentroidSet,
    nn: &[f64],
    nodes: &mut [NodeState],
    points: &mut [PointState],
    counter: &DistanceCounter,
) {
    let mut u = TreeUpdate {
        tree,
        data,
        centroids,
        nn,
        nodes,
        points,
        counter,
        max_movement: centroids.max_movement(),
    };
    u.node(
        tree.root(),
        Ctx {
            frozen: None,
            above: None,
            path_lb: f64::INFINITY,
        },
    );
}

impl TreeUpdate<'_> {
    /// Moves owned bounds; returns the new bounds and whether they freeze.
    fn settle(&self, o: Owned, tighten: impl FnOnce() -> f64) -> (f64, f64, bool) {
        let m = self.centroids.movements()[o.j];
        let lb = o.lb - self.max_movement;
        let ub = o.ub + m;
        let cand = lb.max(self.nn[o.j] - ub);
        if ub < cand {
            return (ub, cand, true);
        }
        let ub = ub.min(tighten());
        let cand = lb.max(self.nn[o.j] - ub);
        (ub, cand, ub < cand)
    }

    fn freeze_node(&mut self, n: usize, f: Owned) {
        let k = self.centroids.k();
        self.nodes[n] = NodeState {
            ub: f.ub,
            lb: f.lb,
            pruned: k - 1,
            closest: f.j,
            canchange: false,
            visited: false,
        };
    }

    /// Returns whether `n` ends up hidden from the next traversal.
    fn node(&mut self, n: usize, ctx: Ctx) -> bool {
        let tree = self.tree;
        let k = self.centroids.k();
        if let Some(f) = ctx.frozen {
            self.freeze_node(n, f);
            for &c in &tree.node(n).children {
                self.node(c, ctx);
            }
            for &p in tree.held_points(n) {
                self.points[p] = PointState {
                    ub: f.ub,
                    lb: f.lb,
                    closest: f.j,
                    canchange: false,
                };
            }
            return true;
        }

        let st = self.nodes[n];
        let own = if st.owned(k) {
            Some(Owned {
                j: st.closest,
                ub: st.ub,
                lb: st.lb,
            })
        } else {
            ctx.above
        };
        let path_lb = if st.visited {
            ctx.path_lb.min(st.lb)
        } else {
            ctx.path_lb
        };

        let child_ctx = if let Some(o) = own {
            let region = &tree.node(n).region;
            let (ub, lb, freeze) = self.settle(o, || {
                region.max_dist_point_unchecked(self.centroids.centroid(o.j), self.counter)
            });
            if freeze {
                let f = Owned { j: o.j, ub, lb };
                return self.node(n, Ctx { frozen: Some(f), ..ctx });
            }
            self.nodes[n] = NodeState {
                ub,
                closest: o.j,
                ..NodeState::fresh()
            };
            Ctx {
                frozen: None,
                above: Some(o),
                path_lb,
            }
        } else {
            let ub = if st.closest == INVALID {
                f64::INFINITY
            } else {
                st.ub + self.max_movement
            };
            self.nodes[n] = NodeState {
                ub,
                closest: st.closest,
                ..NodeState::fresh()
            };
            Ctx {
                frozen: None,
                above: None,
                path_lb,
            }
        };

        let mut all_frozen = true;
        for &c in &tree.node(n).children {
            all_frozen &= self.node(c, child_ctx);
        }
        for &p in tree.held_points(n) {
            all_frozen &= self.point(p, own, path_lb);
        }
        if all_frozen {
            self.nodes[n].canchange = false;
        }
        all_frozen
    }

    /// Returns whether point `p` freezes.
    fn point(&mut self, p: usize, own: Option<Owned>, path_lb: f64) -> bool {
        let ps = self.points[p];
        let o = if !ps.canchange {
            Owned {
                j: ps.closest,
                ub: ps.ub,
                lb: ps.lb,
            }
        } else if let Some(o) = own {
            o
        } else {
            debug_assert_ne!(ps.closest, INVALID, "point {p} has no owner");
            Owned {
                j: ps.closest,
                ub: ps.ub,
                lb: ps.lb.min(path_lb),
            }
        };
        let x = self.data.point(p);
        let (ub, lb, freeze) = self.settle(o, || self.counter.distance(x, self.centroids.centroid(o.j)));
        self.points[p] = if freeze {
            PointState {
                ub,
                lb,
                closest: o.j,
                canchange: false,
            }
        } else {
            PointState {
                closest: o.j,
                ..PointState::fresh()
            }
        };
        freeze
    }
}
