//! BaseCase and Score for dual-tree k-means.

use super::coalesce::Coalesced;
use super::state::{Event, NodeState, PointState};
use crate::metric::{box_max_dist_point, BoundingRegion, CentroidSet, Dataset, DistanceCounter};
use crate::tree::{SpaceTree, TraversalRules};

/// Folds a point-to-centroid distance into the point's two nearest slots.
/// Equal distances go to the lower centroid index.
#[inline]
pub fn base_case(state: &mut PointState, c: usize, d: f64) {
    if d < state.ub || (d == state.ub && c < state.closest) {
        state.lb = state.ub;
        state.ub = d;
        state.closest = c;
    } else if d < state.lb {
        state.lb = d;
    }
}

/// The parts of a centroid-tree node that Score looks at.
#[derive(Clone, Copy, Debug)]
pub struct RefNode<'a> {
    pub region: &'a BoundingRegion,
    /// Index of a descendant centroid and its position.
    pub rep: usize,
    pub rep_point: &'a [f64],
    /// Number of distinct descendant centroids.
    pub count: usize,
}

/// Lower bound between the regions and upper bound from any query
/// descendant to the reference representative.
#[inline]
pub(crate) fn score_bounds(q: &BoundingRegion, r: &RefNode<'_>, counter: &DistanceCounter) -> (f64, f64) {
    match (q, r.region) {
        (BoundingRegion::Ball { center: cq, radius: rq }, BoundingRegion::Ball { center: cr, radius: rr }) => {
            let d = counter.distance(cq, cr);
            ((d - rq - rr).max(0.0), d + rq)
        }
        (BoundingRegion::Box { lo, hi }, _) => (
            q.min_dist_unchecked(r.region, counter)
                .expect("query and reference regions differ in kind"),
            box_max_dist_point(lo, hi, r.rep_point),
        ),
        (BoundingRegion::Ball { .. }, _) => (
            q.min_dist_unchecked(r.region, counter)
                .expect("query and reference regions differ in kind"),
            q.max_dist_point_unchecked(r.rep_point, counter),
        ),
    }
}

/// Scores a query node against a centroid-tree node, returning
/// `f64::INFINITY` to prune.
///
/// `parent` is the query node's parent in the traversed view; its pruned
/// count and lower bound are inherited on the first visit of a pass, along
/// with its upper bound and owner when those are tighter.
pub fn score(
    q_region: &BoundingRegion,
    parent: Option<&NodeState>,
    state: &mut NodeState,
    r: &RefNode<'_>,
    k: usize,
    counter: &DistanceCounter,
) -> f64 {
    if !state.visited {
        state.visited = true;
        if let Some(p) = parent {
            state.pruned = p.pruned;
            state.lb = p.lb;
            if p.ub < state.ub {
                state.ub = p.ub;
                state.closest = p.closest;
            }
        }
        if k == 1 {
            state.closest = 0;
            state.ub = state.ub.min(score_bounds(q_region, r, counter).1);
        }
    }
    if state.pruned + 1 == k {
        return f64::INFINITY;
    }
    let (dmin, dmax) = score_bounds(q_region, r, counter);
    if dmin > state.ub {
        state.lb = state.lb.min(dmin);
        state.pruned += r.count;
        return f64::INFINITY;
    }
    if dmax < state.ub {
        state.ub = dmax;
        state.closest = r.rep;
    }
    if state.pruned + 1 == k {
        return f64::INFINITY;
    }
    dmin
}

/// Re-tests a previously scored pair against the current upper bound. `dmin`
/// is the score returned earlier, so no distance is evaluated.
pub fn rescore(state: &mut NodeState, count: usize, k: usize, dmin: f64) -> f64 {
    if state.pruned + 1 == k {
        return f64::INFINITY;
    }
    if dmin > state.ub {
        state.lb = state.lb.min(dmin);
        state.pruned += count;
        return f64::INFINITY;
    }
    dmin
}

pub(super) struct Rules<'a> {
    pub qt: &'a SpaceTree,
    pub view: &'a Coalesced<'a>,
    pub rt: &'a SpaceTree,
    pub data: &'a Dataset,
    pub centroids: &'a CentroidSet,
    pub nodes: &'a mut [NodeState],
    pub points: &'a mut [PointState],
    pub counter: &'a DistanceCounter,
    pub events: Option<&'a mut Vec<Event>>,
    pub base_cases: u64,
    /// Parent's pruned count when each node was first visited.
    pub inherited: Vec<usize>,
}

impl Rules<'_> {
    /// Hands down prunes that parents made after their children's first
    /// visit. A node is only ever paired with reference subtrees its parent
    /// had not pruned when the pair was scored, so the late prunes are
    /// disjoint from the node's own.
    pub fn propagate(&mut self) {
        for n in 0..self.nodes.len() {
            let Some(p) = self.view.parent(n) else { continue };
            if !self.nodes[n].visited || !self.nodes[p].visited {
                continue;
            }
            let parent = self.nodes[p];
            let extra = parent.pruned - self.inherited[n];
            if extra == 0 {
                continue;
            }
            let st = &mut self.nodes[n];
            st.pruned += extra;
            st.lb = st.lb.min(parent.lb);
            if let Some(ev) = self.events.as_deref_mut() {
                ev.push(Event::Propagate {
                    query: n,
                    parent: p,
                    count: extra,
                });
            }
        }
    }
}

impl TraversalRules for Rules<'_> {
    fn score(&mut self, q: usize, r: usize) -> f64 {
        let k = self.centroids.k();
        let first = !self.nodes[q].visited;
        let parent = self.view.parent(q).map(|p| self.nodes[p]);
        let rep = self.rt.representative(r);
        let rnode = RefNode {
            region: &self.rt.node(r).region,
            rep,
            rep_point: self.centroids.centroid(rep),
            count: self.rt.node(r).descendant_count(),
        };
        let before = self.nodes[q].pruned;
        if first {
            self.inherited[q] = parent.map_or(0, |p| p.pruned);
        }
        let s = score(
            &self.qt.node(q).region,
            parent.as_ref(),
            &mut self.nodes[q],
            &rnode,
            k,
            self.counter,
        );
        if let Some(ev) = self.events.as_deref_mut() {
            let st = &self.nodes[q];
            if first {
                ev.push(Event::Inherit {
                    query: q,
                    parent: self.view.parent(q),
                    pruned: parent.map_or(0, |p| p.pruned),
                });
            }
            let inherited = if first { parent.map_or(0, |p| p.pruned) } else { before };
            if st.pruned > inherited {
                ev.push(Event::Prune {
                    query: q,
                    reference: r,
                    count: st.pruned - inherited,
                });
            }
        }
        s
    }

    fn rescore(&mut self, q: usize, r: usize, s: f64) -> f64 {
        let count = self.rt.node(r).descendant_count();
        let before = self.nodes[q].pruned;
        let s = rescore(&mut self.nodes[q], count, self.centroids.k(), s);
        if let Some(ev) = self.events.as_deref_mut() {
            let now = self.nodes[q].pruned;
            if now > before {
                ev.push(Event::Prune {
                    query: q,
                    reference: r,
                    count: now - before,
                });
            }
        }
        s
    }

    fn base_case(&mut self, p: usize, c: usize) {
        let st = &mut self.points[p];
        if !st.canchange {
            return;
        }
        self.base_cases += 1;
        let d = self.counter.distance(self.data.point(p), self.centroids.centroid(c));
        base_case(st, c, d);
    }
}
