use std::fmt::Write;

use super::SpaceTree;
use crate::metric::BoundingRegion;

pub(super) fn render(t: &SpaceTree) -> String {
    let mut out = String::new();
    let mut stack = vec![(t.root(), 0usize)];
    while let Some((i, depth)) = stack.pop() {
        let n = t.node(i);
        let _ = write!(out, "{:indent$}node {i}", "", indent = 2 * depth);
        if let Some(s) = n.scale {
            let _ = write!(out, " scale={s}");
        } else if n.is_leaf() && matches!(n.region, BoundingRegion::Ball { .. }) {
            let _ = write!(out, " scale=-inf");
        }
        match &n.region {
            BoundingRegion::Box { lo, hi } => {
                let _ = write!(out, " box={lo:?}..{hi:?}");
            }
            BoundingRegion::Ball { center, radius } => {
                let _ = write!(out, " ball={center:?} r={radius}");
            }
        }
        let _ = write!(out, " count={}", n.descendant_count());
        if n.is_leaf() {
            let _ = write!(out, " points={:?}", t.held_points(i));
        }
        out.push('\n');
        for &c in n.children.iter().rev() {
            stack.push((c, depth + 1));
        }
    }
    out
}
