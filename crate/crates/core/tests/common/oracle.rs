//! Brute-force oracles for the dual-tree bounds and for lockstep runs.

use super::{brute_all, centroids_close, instance, slack};
use dtkmeans::dualtree::{DualTree, Event, INVALID};
use dtkmeans::kmeans::objective;
use dtkmeans::tree::{SpaceTree, TreeKind};
use dtkmeans::{Algorithm, CentroidSet, ClusteringConfig, Dataset, KMeansStep};
use std::collections::BTreeSet;

fn centroid_tree(kind: TreeKind, c: &CentroidSet) -> SpaceTree {
    match kind {
        TreeKind::Kd => SpaceTree::kd(c.positions(), 1).unwrap(),
        TreeKind::Cover => SpaceTree::cover(c.positions()).unwrap(),
    }
}

fn ancestors(tree: &SpaceTree, mut n: usize) -> Vec<usize> {
    let mut out = Vec::new();
    while let Some(p) = tree.node(n).parent {
        out.push(p);
        n = p;
    }
    out
}

/// Replays the event log into the set of centroids each node pruned.
fn pruned_sets(dt: &DualTree<'_>, ctree: &SpaceTree) -> Vec<Option<BTreeSet<usize>>> {
    let mut sets: Vec<Option<BTreeSet<usize>>> = vec![None; dt.tree().node_count()];
    for e in dt.events() {
        match *e {
            Event::Inherit { query, parent, pruned } => {
                let s = parent.map_or_else(BTreeSet::new, |p| sets[p].clone().unwrap_or_default());
                assert_eq!(s.len(), pruned, "inherited count of node {query}");
                sets[query] = Some(s);
            }
            Event::Prune {
                query,
                reference,
                count,
            } => {
                let s = sets[query].as_mut().expect("prune before first visit");
                let refs = ctree.descendant_points(reference);
                assert_eq!(refs.len(), count);
                for &c in refs {
                    assert!(s.insert(c), "centroid {c} pruned twice for node {query}");
                }
            }
            Event::Propagate { query, parent, count } => {
                let from = sets[parent].clone().expect("parent visited");
                let s = sets[query].as_mut().expect("child visited");
                let added = from.iter().filter(|&&c| s.insert(c)).count();
                assert_eq!(added, count, "late prunes of node {parent} overlap node {query}");
            }
        }
    }
    sets
}

pub fn check_pass(dt: &DualTree<'_>, data: &Dataset, c: &CentroidSet, violations: &mut Vec<String>) {
    let k = c.k();
    let tree = dt.tree();
    let truth = brute_all(data, c);
    let ctree = centroid_tree(tree.kind(), c);
    let sets = pruned_sets(dt, &ctree);
    let nodes = dt.node_states();
    let mut fail = |m: String| violations.push(m);
    for (i, st) in nodes.iter().enumerate() {
        let desc = tree.descendant_points(i);
        if st.pruned > k - 1 {
            fail(format!("node {i}: pruned {} > k-1", st.pruned));
        }
        if !st.visited && st.canchange {
            continue;
        }
        if st.canchange {
            let set = sets[i].as_ref().expect("visited node has a first visit");
            if set.len() != st.pruned {
                fail(format!("node {i}: pruned {} but recount {}", st.pruned, set.len()));
            }
            for &p in desc {
                for &j in set {
                    if truth[p].0 == j {
                        fail(format!("node {i}: pruned the owner {j} of point {p}"));
                    }
                    let d = dtkmeans::metric::euclidean(data.point(p), c.centroid(j));
                    if st.lb > d + slack(d) {
                        fail(format!("node {i}: lb {} above d(p{p}, c{j}) = {d}", st.lb));
                    }
                }
            }
        }
        if st.closest != INVALID {
            for &p in desc {
                let d = dtkmeans::metric::euclidean(data.point(p), c.centroid(st.closest));
                if st.ub + slack(d) < d {
                    fail(format!("node {i}: ub {} below d(p{p}, closest) = {d}", st.ub));
                }
            }
        }
        if st.owned(k) {
            for &p in desc {
                if truth[p].0 != st.closest {
                    fail(format!(
                        "node {i}: owned by {} but point {p} is owned by {}",
                        st.closest, truth[p].0
                    ));
                }
                if st.lb > truth[p].2 + slack(truth[p].2) {
                    fail(format!("node {i}: lb {} above second-nearest of p{p}", st.lb));
                }
            }
        }
    }
    // Points not covered by an owned node settle their own owner.
    for leaf in (0..tree.node_count()).filter(|&i| tree.node(i).is_leaf()) {
        let chain: Vec<usize> = std::iter::once(leaf).chain(ancestors(tree, leaf)).collect();
        if chain
            .iter()
            .any(|&a| nodes[a].owned(k) && (nodes[a].visited || !nodes[a].canchange))
        {
            continue;
        }
        let path_lb = chain
            .iter()
            .filter(|&&a| nodes[a].visited)
            .map(|&a| nodes[a].lb)
            .fold(f64::INFINITY, f64::min);
        for &p in tree.held_points(leaf) {
            let ps = dt.point_states()[p];
            let (o, d1, d2) = truth[p];
            if ps.closest != o {
                fail(format!("point {p}: closest {} but owner {o}", ps.closest));
            }
            if ps.canchange && ps.ub != d1 {
                fail(format!("point {p}: ub {} but nearest {d1}", ps.ub));
            }
            if ps.lb.min(path_lb) > d2 + slack(d2) {
                fail(format!(
                    "point {p}: lb {} above second-nearest {d2}",
                    ps.lb.min(path_lb)
                ));
            }
        }
    }
}

pub fn check_update(dt: &DualTree<'_>, data: &Dataset, c: &CentroidSet, violations: &mut Vec<String>) {
    let tree = dt.tree();
    let truth = brute_all(data, c);
    let mut fail = |m: String| violations.push(m);
    for (i, st) in dt.node_states().iter().enumerate() {
        let desc = tree.descendant_points(i);
        if st.closest != INVALID && st.ub.is_finite() {
            for &p in desc {
                let d = dtkmeans::metric::euclidean(data.point(p), c.centroid(st.closest));
                if st.ub + slack(d) < d {
                    fail(format!("after update, node {i}: ub {} below {d}", st.ub));
                }
            }
        }
        if !st.canchange && !st.owned(c.k()) {
            // Frozen because every child froze; owners are per point.
            if let Some(&p) = desc.iter().find(|&&p| dt.point_states()[p].canchange) {
                fail(format!("frozen node {i} has mobile point {p}"));
            }
        } else if !st.canchange {
            for &p in desc {
                let (o, _, d2) = truth[p];
                if o != st.closest {
                    fail(format!(
                        "frozen node {i} owned by {} loses point {p} to {o}",
                        st.closest
                    ));
                }
                if st.lb > d2 + slack(d2) {
                    fail(format!(
                        "after update, frozen node {i}: lb {} above second-nearest {d2}",
                        st.lb
                    ));
                }
            }
        }
    }
    for (p, ps) in dt.point_states().iter().enumerate() {
        if ps.canchange {
            if ps.ub.is_finite() || ps.lb.is_finite() {
                fail(format!("mobile point {p} kept finite bounds"));
            }
            continue;
        }
        let (o, d1, d2) = truth[p];
        if ps.closest != o {
            fail(format!(
                "frozen point {p} owned by {} but next owner is {o}",
                ps.closest
            ));
        }
        if ps.ub + slack(d1) < d1 || ps.lb > d2 + slack(d2) {
            fail(format!(
                "frozen point {p}: bounds ({}, {}) vs ({d1}, {d2})",
                ps.ub, ps.lb
            ));
        }
    }
}

/// Runs every detected violation for one instance on both tree kinds.
pub fn bound_violations(seed: u64) -> (Vec<String>, usize) {
    let inst = instance(seed, (20, 300), (1, 4), (1, 12));
    let mut violations = Vec::new();
    let mut frozen = 0;
    for kind in [TreeKind::Kd, TreeKind::Cover] {
        let mut dt = DualTree::new(&inst.data, CentroidSet::new(inst.initial.clone()), kind, 4).unwrap();
        dt.record_events(true);
        for _ in 0..60 {
            let c = dt.centroids().clone();
            dt.run_pass();
            check_pass(&dt, &inst.data, &c, &mut violations);
            dt.finish_iteration();
            let next = dt.centroids().clone();
            check_update(&dt, &inst.data, &next, &mut violations);
            frozen += dt.node_states().iter().filter(|s| !s.canchange).count();
            if next.max_movement() == 0.0 {
                break;
            }
        }
    }
    (violations, frozen)
}

/// Steps every algorithm in lockstep with naive Lloyd, comparing the
/// assignments of each iteration and the centroid trajectories.
pub fn lockstep(seed: u64, algorithms: &[Algorithm]) -> Result<usize, String> {
    let inst = instance(seed, (50, 500), (1, 5), (2, 20));
    let (data, initial) = (&inst.data, &inst.initial);
    let k = initial.len();
    let config = ClusteringConfig::new(k);
    let mut naive = Algorithm::Naive.start(data, initial, &config).unwrap();
    let mut others: Vec<_> = algorithms
        .iter()
        .map(|a| (*a, a.start(data, initial, &config).unwrap()))
        .collect();
    let mut prev = f64::INFINITY;
    for it in 1..=300 {
        let before = naive.centroids().clone();
        let s = naive.step().unwrap();
        if s.distance_calcs != (k * data.len()) as u64 {
            return Err(format!("seed {seed}: naive counted {} not kN", s.distance_calcs));
        }
        let truth: Vec<usize> = brute_all(data, &before).into_iter().map(|o| o.0).collect();
        if naive.assignments() != &truth[..] {
            return Err(format!("seed {seed}: naive disagrees with brute force"));
        }
        let obj = objective(data, &before, naive.assignments());
        if obj > prev + 1e-9 * prev.max(1.0) {
            return Err(format!("seed {seed}: objective rose"));
        }
        prev = obj;
        for (a, step) in &mut others {
            step.step().unwrap();
            if step.assignments() != naive.assignments() {
                return Err(format!("seed {seed}, {a}, iteration {it}: assignments differ"));
            }
            if !centroids_close(step.centroids(), naive.centroids(), 1e-8) {
                return Err(format!("seed {seed}, {a}, iteration {it}: centroids diverged"));
            }
        }
        if naive.centroids().max_movement() <= config.tolerance {
            return Ok(it);
        }
    }
    Ok(300)
}
