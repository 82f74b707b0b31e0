//! Generic pruning dual depth-first traversal.

/// The hierarchy a traversal walks: possibly a coalesced view of a tree.
pub trait TreeView {
    fn root(&self) -> usize;
    fn children(&self, node: usize) -> &[usize];
    fn points(&self, node: usize) -> &[usize];
}

/// Problem-specific callbacks that, with the trees, define a dual-tree
/// algorithm.
pub trait TraversalRules {
    /// Priority of a node pair; `f64::INFINITY` prunes the pair and every
    /// pair below it.
    fn score(&mut self, query: usize, reference: usize) -> f64;

    /// Called right before recursing into a pair scored earlier, after its
    /// siblings may have tightened the rules' state. Returns the possibly
    /// updated score; `f64::INFINITY` skips the pair.
    fn rescore(&mut self, _query: usize, _reference: usize, score: f64) -> f64 {
        score
    }

    fn base_case(&mut self, query_point: usize, reference_point: usize);
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct TraversalStats {
    pub scores: u64,
    pub base_cases: u64,
    pub prunes: u64,
}

/// Visits node pairs top-down. Each visited pair runs base cases on its held
/// points, then scores child pairs and recurses into the unpruned ones in
/// ascending score order, rescoring each just before its turn. Descent is
/// synchronous while both nodes have children, so no pair is visited twice.
pub fn dual_depth_first<Q, R, U>(query: &Q, reference: &R, rules: &mut U) -> TraversalStats
where
    Q: TreeView + ?Sized,
    R: TreeView + ?Sized,
    U: TraversalRules + ?Sized,
{
    let mut t = Traversal {
        query,
        reference,
        rules,
        stats: TraversalStats::default(),
    };
    let (q, r) = (query.root(), reference.root());
    if t.score(q, r).is_finite() {
        t.visit(q, r);
    }
    t.stats
}

struct Traversal<'a, Q: ?Sized, R: ?Sized, U: ?Sized> {
    query: &'a Q,
    reference: &'a R,
    rules: &'a mut U,
    stats: TraversalStats,
}

impl<Q, R, U> Traversal<'_, Q, R, U>
where
    Q: TreeView + ?Sized,
    R: TreeView + ?Sized,
    U: TraversalRules + ?Sized,
{
    fn score(&mut self, q: usize, r: usize) -> f64 {
        self.stats.scores += 1;
        let s = self.rules.score(q, r);
        if !s.is_finite() {
            self.stats.prunes += 1;
        }
        s
    }

    fn rescore(&mut self, q: usize, r: usize, s: f64) -> f64 {
        if !s.is_finite() {
            return s;
        }
        let s = self.rules.rescore(q, r, s);
        if !s.is_finite() {
            self.stats.prunes += 1;
        }
        s
    }

    fn visit(&mut self, q: usize, r: usize) {
        let (qt, rt) = (self.query, self.reference);
        for &pq in qt.points(q) {
            for &pr in rt.points(r) {
                self.rules.base_case(pq, pr);
            }
            self.stats.base_cases += rt.points(r).len() as u64;
        }
        let (qc, rc) = (qt.children(q), rt.children(r));
        match (qc.is_empty(), rc.is_empty()) {
            (true, true) => {}
            (true, false) => self.descend(q, rc),
            (false, true) => {
                let mut order: Vec<(f64, usize)> = qc.iter().map(|&c| (self.score(c, r), c)).collect();
                order.sort_by(|a, b| a.0.total_cmp(&b.0));
                for (s, c) in order {
                    if self.rescore(c, r, s).is_finite() {
                        self.visit(c, r);
                    }
                }
            }
            (false, false) => {
                for &c in qc {
                    self.descend(c, rc);
                }
            }
        }
    }

    /// Scores `q` against each of `refs` and recurses best-first.
    fn descend(&mut self, q: usize, refs: &[usize]) {
        let mut order: Vec<(f64, usize)> = refs.iter().map(|&r| (self.score(q, r), r)).collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0));
        for (s, r) in order {
            if self.rescore(q, r, s).is_finite() {
                self.visit(q, r);
            }
        }
    }
}
