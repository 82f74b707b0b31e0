//! Cover tree construction by top-down insertion over explicit levels,
//! followed by compression to one node per (point, scale with children).

use std::collections::HashMap;

use super::{mean_of, mean_of_children, SpaceTree, TreeKind, TreeNode};
use crate::metric::{BoundingRegion, Dataset, DistanceCounter};

#[inline]
fn pow2(i: i32) -> f64 {
    2f64.powi(i)
}

fn key(p: &[f64]) -> Vec<u64> {
    // +0.0 folds -0.0 into 0.0 so equal coordinates hash equally.
    p.iter().map(|v| (v + 0.0).to_bits()).collect()
}

struct Builder<'a> {
    data: &'a Dataset,
    counter: &'a DistanceCounter,
    /// Points that are children of `p` at scale `i` and so live at `i - 1`.
    children: HashMap<(usize, i32), Vec<usize>>,
}

impl Builder<'_> {
    fn dist(&self, a: usize, b: usize) -> f64 {
        self.counter.distance(self.data.point(a), self.data.point(b))
    }

    fn insert(&mut self, p: usize, root: usize, top: i32) {
        let mut qi = vec![(root, self.dist(p, root))];
        let mut i = top;
        let mut levels: Vec<(i32, Vec<(usize, f64)>)> = Vec::new();
        loop {
            let mut q = qi.clone();
            for &(c, _) in &qi {
                if let Some(ch) = self.children.get(&(c, i)) {
                    for &x in ch {
                        q.push((x, self.counter.distance(self.data.point(p), self.data.point(x))));
                    }
                }
            }
            let dmin = q.iter().map(|e| e.1).fold(f64::INFINITY, f64::min);
            let r = pow2(i);
            levels.push((i, qi));
            if dmin > r {
                break;
            }
            qi = q.into_iter().filter(|e| e.1 <= r).collect();
            i -= 1;
        }
        levels.pop();
        while let Some((lvl, q)) = levels.pop() {
            let r = pow2(lvl);
            let best = q
                .iter()
                .filter(|e| e.1 <= r)
                .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
            if let Some(&(parent, _)) = best {
                self.children.entry((parent, lvl)).or_default().push(p);
                return;
            }
        }
        unreachable!("the root covers every point at the top scale");
    }
}

pub(super) fn build(data: &Dataset, counter: &DistanceCounter) -> SpaceTree {
    let n = data.len();
    let mut canonical: HashMap<Vec<u64>, usize> = HashMap::new();
    let mut dups: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut unique = Vec::new();
    for i in 0..n {
        match canonical.entry(key(data.point(i))) {
            std::collections::hash_map::Entry::Occupied(e) => dups[*e.get()].push(i),
            std::collections::hash_map::Entry::Vacant(e) => {
                e.insert(i);
                unique.push(i);
            }
        }
    }

    let root = unique[0];
    let mut b = Builder {
        data,
        counter,
        children: HashMap::new(),
    };
    let maxd = unique[1..].iter().map(|&u| b.dist(root, u)).fold(0.0, f64::max);
    let mut top = if maxd > 0.0 { maxd.log2().ceil() as i32 } else { 0 };
    while pow2(top) < maxd {
        top += 1;
    }
    for &p in &unique[1..] {
        b.insert(p, root, top);
    }

    let mut levels: HashMap<usize, Vec<i32>> = HashMap::new();
    for &(p, i) in b.children.keys() {
        levels.entry(p).or_default().push(i);
    }
    for v in levels.values_mut() {
        v.sort_unstable_by(|a, b| b.cmp(a));
    }

    let mut e = Emitter {
        data,
        counter,
        children: &b.children,
        levels: &levels,
        dups: &dups,
        nodes: Vec::with_capacity(2 * n),
        perm: Vec::with_capacity(n),
    };
    e.emit(root, 0, None);
    SpaceTree::from_parts(TreeKind::Cover, data.dim(), e.nodes, e.perm)
}

struct Emitter<'a> {
    data: &'a Dataset,
    counter: &'a DistanceCounter,
    children: &'a HashMap<(usize, i32), Vec<usize>>,
    levels: &'a HashMap<usize, Vec<i32>>,
    dups: &'a [Vec<usize>],
    nodes: Vec<TreeNode>,
    perm: Vec<usize>,
}

impl Emitter<'_> {
    /// Emits the node for `p` at its `li`-th scale with children, or its leaf.
    fn emit(&mut self, p: usize, li: usize, parent: Option<usize>) -> usize {
        let id = self.nodes.len();
        let start = self.perm.len();
        let scale = self.levels.get(&p).and_then(|v| v.get(li)).copied();
        self.nodes.push(TreeNode {
            region: BoundingRegion::Ball {
                center: self.data.point(p).to_vec(),
                radius: 0.0,
            },
            children: Vec::new(),
            parent,
            start,
            end: start,
            descendant_mean: Vec::new(),
            scale,
        });
        let mean = match scale {
            None => {
                self.perm.push(p);
                self.perm.extend_from_slice(&self.dups[p]);
                mean_of(self.data, &self.perm[start..])
            }
            Some(s) => {
                let mut kids = vec![self.emit(p, li + 1, Some(id))];
                for &c in &self.children[&(p, s)] {
                    kids.push(self.emit(c, 0, Some(id)));
                }
                let m = mean_of_children(&self.nodes, &kids, self.data.dim());
                self.nodes[id].children = kids;
                m
            }
        };
        let end = self.perm.len();
        let center = self.data.point(p);
        let radius = self.perm[start + 1..end]
            .iter()
            .map(|&x| self.counter.distance(center, self.data.point(x)))
            .fold(0.0, f64::max);
        let node = &mut self.nodes[id];
        node.end = end;
        node.descendant_mean = mean;
        node.region = BoundingRegion::Ball {
            center: center.to_vec(),
            radius,
        };
        id
    }
}
