use super::{SpaceTree, TreeKind};
use crate::metric::{euclidean, BoundingRegion, Dataset};

const SLACK: f64 = 1e-9;

pub(super) fn check(t: &SpaceTree, data: &Dataset) -> Result<(), String> {
    structure(t, data)?;
    contents(t, data)?;
    if t.kind() == TreeKind::Cover {
        cover_invariants(t, data)?;
    }
    Ok(())
}

fn structure(t: &SpaceTree, data: &Dataset) -> Result<(), String> {
    let nodes = t.nodes();
    if nodes.is_empty() || nodes[0].parent.is_some() {
        return Err("node 0 must be a parentless root".into());
    }
    let root = &nodes[0];
    if root.start != 0 || root.end != data.len() {
        return Err("root must span every point".into());
    }
    let mut seen = vec![false; data.len()];
    for &p in t.perm() {
        if p >= data.len() || std::mem::replace(&mut seen[p], true) {
            return Err(format!("perm is not a permutation (index {p})"));
        }
    }
    if t.perm().len() != data.len() {
        return Err("perm length differs from the point count".into());
    }
    let mut reached = vec![false; nodes.len()];
    reached[0] = true;
    for (i, n) in nodes.iter().enumerate() {
        if n.start >= n.end {
            return Err(format!("node {i} has no descendants"));
        }
        let mut cursor = n.start;
        for &c in &n.children {
            if c <= i || c >= nodes.len() {
                return Err(format!("node {i} has out-of-order child {c}"));
            }
            if nodes[c].parent != Some(i) {
                return Err(format!("child {c} does not link back to {i}"));
            }
            if std::mem::replace(&mut reached[c], true) {
                return Err(format!("node {c} has two parents"));
            }
            if nodes[c].start != cursor {
                return Err(format!("children of {i} do not tile its range"));
            }
            cursor = nodes[c].end;
        }
        if !n.children.is_empty() && cursor != n.end {
            return Err(format!("children of {i} do not cover its range"));
        }
    }
    if let Some(i) = reached.iter().position(|r| !r) {
        return Err(format!("node {i} is unreachable from the root"));
    }
    Ok(())
}

fn contents(t: &SpaceTree, data: &Dataset) -> Result<(), String> {
    for (i, n) in t.nodes().iter().enumerate() {
        let pts = t.descendant_points(i);
        for &p in pts {
            let x = data.point(p);
            let inside = match &n.region {
                BoundingRegion::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (l, h))| l <= v && v <= h),
                BoundingRegion::Ball { center, radius } => euclidean(center, x) <= radius + SLACK,
            };
            if !inside {
                return Err(format!("point {p} escapes the region of node {i}"));
            }
        }
        let mut mean = vec![0.0; data.dim()];
        for &p in pts {
            for (m, v) in mean.iter_mut().zip(data.point(p)) {
                *m += v;
            }
        }
        for (j, m) in mean.iter_mut().enumerate() {
            *m /= pts.len() as f64;
            let cached = n.descendant_mean[j];
            if (cached - *m).abs() > 1e-10 * m.abs().max(1.0) {
                return Err(format!("node {i} caches mean {cached} in dimension {j}, actual {m}"));
            }
        }
    }
    Ok(())
}

fn cover_invariants(t: &SpaceTree, data: &Dataset) -> Result<(), String> {
    let nodes = t.nodes();
    let pow2 = |s: i32| 2f64.powi(s);
    // Attachment scale of every distinct point: the scale it first appears at.
    let mut attach: Vec<Option<i32>> = vec![None; data.len()];
    for (i, n) in nodes.iter().enumerate() {
        let p = t.representative(i);
        if n.is_leaf() {
            if n.scale.is_some() {
                return Err(format!("leaf {i} has a finite scale"));
            }
            for &q in t.descendant_points(i) {
                if data.point(q) != data.point(p) {
                    return Err(format!("leaf {i} holds point {q} that is not a duplicate of {p}"));
                }
            }
        }
        let Some(s) = n.scale else {
            if !n.is_leaf() {
                return Err(format!("internal node {i} has scale -inf"));
            }
            continue;
        };
        let BoundingRegion::Ball { radius, .. } = n.region else {
            return Err(format!("cover node {i} is not a ball"));
        };
        if radius > pow2(s + 1) + SLACK {
            return Err(format!("node {i} at scale {s} has radius {radius}"));
        }
        if t.representative(n.children[0]) != p {
            return Err(format!("first child of node {i} is not its self-child"));
        }
        for (ci, &c) in n.children.iter().enumerate() {
            if let Some(cs) = nodes[c].scale {
                if cs >= s {
                    return Err(format!("child {c} of node {i} does not descend in scale"));
                }
            }
            if ci > 0 {
                let q = t.representative(c);
                let d = euclidean(data.point(p), data.point(q));
                if d > pow2(s) + SLACK {
                    return Err(format!("child {c} of node {i} is {d} away, beyond 2^{s}"));
                }
                attach[q] = Some(s - 1);
            }
        }
    }
    let root = t.representative(0);
    attach[root] = Some(nodes[0].scale.unwrap_or(0));
    let distinct: Vec<usize> = (0..data.len()).filter(|&p| attach[p].is_some()).collect();
    for (a, &p) in distinct.iter().enumerate() {
        for &q in &distinct[a + 1..] {
            let d = euclidean(data.point(p), data.point(q));
            if d == 0.0 {
                continue;
            }
            let s = attach[p].unwrap().min(attach[q].unwrap());
            if d <= pow2(s) {
                return Err(format!("points {p} and {q} at distance {d} both appear at scale {s}"));
            }
        }
    }
    Ok(())
}
