use super::{mean_of, mean_of_children, SpaceTree, TreeKind, TreeNode};
use crate::metric::{BoundingRegion, Dataset};

/// Below this depth splits use the midpoint of the widest dimension; deeper
/// nodes split at the median so that skewed data cannot produce a tree as
/// deep as it is wide.
const MIDPOINT_DEPTH: usize = 64;

pub(super) fn build(data: &Dataset, leaf_size: usize) -> SpaceTree {
    let mut perm: Vec<usize> = (0..data.len()).collect();
    let mut nodes = Vec::with_capacity(2 * data.len() / leaf_size + 1);
    split(data, leaf_size, &mut perm, 0, data.len(), None, 0, &mut nodes);
    SpaceTree::from_parts(TreeKind::Kd, data.dim(), nodes, perm)
}

#[allow(clippy::too_many_arguments)]
fn split(
    data: &Dataset,
    leaf_size: usize,
    perm: &mut [usize],
    start: usize,
    end: usize,
    parent: Option<usize>,
    depth: usize,
    nodes: &mut Vec<TreeNode>,
) -> usize {
    let id = nodes.len();
    let region = BoundingRegion::bounding_box(data.dim(), perm[start..end].iter().map(|&i| data.point(i)));
    let BoundingRegion::Box { lo, hi } = &region else {
        unreachable!()
    };
    let (dim, spread) = (0..data.dim())
        .map(|j| (j, hi[j] - lo[j]))
        .fold((0, f64::NEG_INFINITY), |best, c| if c.1 > best.1 { c } else { best });
    let mid_value = lo[dim] + spread / 2.0;
    nodes.push(TreeNode {
        region,
        children: Vec::new(),
        parent,
        start,
        end,
        descendant_mean: Vec::new(),
        scale: None,
    });
    if end - start <= leaf_size {
        nodes[id].descendant_mean = mean_of(data, &perm[start..end]);
        return id;
    }

    let slice = &mut perm[start..end];
    let mid = if spread > 0.0 && depth < MIDPOINT_DEPTH {
        partition(slice, |i| data.point(i)[dim] < mid_value)
    } else {
        let half = slice.len() / 2;
        if spread > 0.0 {
            slice.select_nth_unstable_by(half, |&a, &b| {
                data.point(a)[dim].total_cmp(&data.point(b)[dim]).then(a.cmp(&b))
            });
        }
        half
    };

    let left = split(data, leaf_size, perm, start, start + mid, Some(id), depth + 1, nodes);
    let right = split(data, leaf_size, perm, start + mid, end, Some(id), depth + 1, nodes);
    nodes[id].children = vec![left, right];
    nodes[id].descendant_mean = mean_of_children(nodes, &[left, right], data.dim());
    id
}

/// Stable partition moving `pred`-true elements first; returns their count.
fn partition(slice: &mut [usize], pred: impl Fn(usize) -> bool) -> usize {
    let (mut yes, no): (Vec<usize>, Vec<usize>) = slice.iter().partition(|&&i| pred(i));
    let n = yes.len();
    yes.extend(no);
    slice.copy_from_slice(&yes);
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tree::TreeView;

    #[test]
    fn single_point_is_one_leaf() {
        let data = Dataset::from_rows(&[[1.0, 2.0]]).unwrap();
        let t = build(&data, 20);
        assert_eq!(t.node_count(), 1);
        assert_eq!(t.node(0).descendant_count(), 1);
        assert_eq!(t.points(0), &[0]);
    }

    #[test]
    fn collinear_eight_points() {
        let rows: Vec<[f64; 1]> = (0..8).map(|i| [i as f64]).collect();
        let data = Dataset::from_rows(&rows).unwrap();
        let t = build(&data, 1);
        assert_eq!(t.node_count(), 15);
        assert_eq!(t.depth(), 3);
        assert_eq!(
            t.node(0).region,
            BoundingRegion::Box {
                lo: vec![0.0],
                hi: vec![7.0]
            }
        );
        let left = t.node(0).children[0];
        assert_eq!(t.descendant_points(left), &[0, 1, 2, 3]);
    }

    #[test]
    fn identical_points_split_by_count() {
        let data = Dataset::from_rows(&[[2.0, 2.0]; 9]).unwrap();
        let t = build(&data, 2);
        t.validate(&data).unwrap();
        for n in t.nodes() {
            assert!(n.descendant_count() <= 2 || !n.is_leaf());
        }
    }

    #[test]
    fn skewed_data_stays_shallow() {
        let rows: Vec<[f64; 1]> = (0..2000).map(|i| [2f64.powi(-(i % 900))]).collect();
        let data = Dataset::from_rows(&rows).unwrap();
        let t = build(&data, 1);
        t.validate(&data).unwrap();
        assert!(t.depth() < MIDPOINT_DEPTH + 40);
    }
}
