//! Unique shortest-path trees over the perturbed weights, Euler-tour subtree
//! intervals, constant-time LCA, and the path/intactness predicates.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::error::BuildError;
use crate::fault::FaultSet;
use crate::graph::{
    EdgeId, Graph, PerturbedGraph, Vertex, INF_H, INF_W, NO_EDGE, NO_VERTEX,
};

/// One rooted shortest-path tree. Also used for the trees of G−F in the
/// single-fault index, hence "core": the LCA structure is layered separately.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SptCore {
    pub source: Vertex,
    pub parent: Vec<Vertex>,
    pub parent_edge: Vec<EdgeId>,
    pub dist_w: Vec<u64>,
    pub dist_h: Vec<u32>,
    /// Euler-tour interval [tin, tout): v's subtree is exactly the vertices u
    /// with tin[v] <= tin[u] < tout[v]. Unreachable vertices keep u32::MAX.
    pub tin: Vec<u32>,
    pub tout: Vec<u32>,
}

impl SptCore {
    #[inline]
    pub fn reachable(&self, v: Vertex) -> bool {
        self.dist_w[v as usize] != INF_W
    }

    /// True iff `a` is an ancestor of `d` (inclusive: every vertex is its own
    /// ancestor). Equivalently: a lies on the tree path source→d.
    #[inline]
    pub fn is_ancestor(&self, a: Vertex, d: Vertex) -> bool {
        let (a, d) = (a as usize, d as usize);
        self.tin[a] <= self.tin[d] && self.tin[d] < self.tout[a]
    }

    /// The child-side endpoint of tree edge `e`, if `e` is a tree edge.
    #[inline]
    pub fn tree_edge_lower(&self, g: &Graph, e: EdgeId) -> Option<Vertex> {
        let (u, v) = g.endpoints(e);
        if self.parent_edge[u as usize] == e {
            Some(u)
        } else if self.parent_edge[v as usize] == e {
            Some(v)
        } else {
            None
        }
    }

    /// True iff `e` lies on the tree path source→t. O(1): a tree edge is on
    /// the path iff t sits below its child-side endpoint.
    #[inline]
    pub fn edge_on_root_path(&self, g: &Graph, e: EdgeId, t: Vertex) -> bool {
        if !self.reachable(t) {
            return false;
        }
        match self.tree_edge_lower(g, e) {
            Some(z) => self.is_ancestor(z, t),
            None => false,
        }
    }

    /// True iff any fault edge lies on the tree path source→t.
    #[inline]
    pub fn fault_on_root_path(&self, g: &Graph, f: &FaultSet, t: Vertex) -> bool {
        f.edges().any(|e| self.edge_on_root_path(g, e, t))
    }

    /// No fault endpoint strictly between source and x on the tree path;
    /// endpoints equal to the source or to x itself are allowed.
    pub fn prefix_intact(&self, x: Vertex, f: &FaultSet) -> bool {
        debug_assert!(self.reachable(x));
        !f.endpoints().any(|w| {
            w != self.source && w != x && self.reachable(w) && self.is_ancestor(w, x)
        })
    }

    /// No fault endpoint inside the subtree rooted at x (x included).
    pub fn subtree_intact(&self, x: Vertex, f: &FaultSet) -> bool {
        debug_assert!(self.reachable(x));
        !f.endpoints()
            .any(|w| self.reachable(w) && self.is_ancestor(x, w))
    }

    /// x is clean from F when both its root path and its subtree are intact.
    pub fn is_clean(&self, x: Vertex, f: &FaultSet) -> bool {
        self.prefix_intact(x, f) && self.subtree_intact(x, f)
    }

    /// Vertices of the tree path source→v, source first.
    pub fn path_to(&self, v: Vertex) -> Vec<Vertex> {
        debug_assert!(self.reachable(v));
        let mut path = Vec::with_capacity(self.dist_h[v as usize] as usize + 1);
        let mut cur = v;
        loop {
            path.push(cur);
            if cur == self.source {
                break;
            }
            cur = self.parent[cur as usize];
        }
        path.reverse();
        path
    }
}

/// Dijkstra from `s` on G−avoid with tie detection: if any vertex ever admits
/// two distinct predecessors at equal perturbed distance, the perturbation
/// failed to isolate a unique tree and the caller must resample the seed.
pub fn dijkstra_avoiding(
    pg: &PerturbedGraph,
    s: Vertex,
    avoid: &FaultSet,
) -> Result<SptCore, BuildError> {
    let n = pg.n() as usize;
    let g = &pg.graph;
    let mut dist_w = vec![INF_W; n];
    let mut parent = vec![NO_VERTEX; n];
    let mut parent_edge = vec![NO_EDGE; n];
    let mut done = vec![false; n];
    let mut heap: BinaryHeap<Reverse<(u64, Vertex)>> = BinaryHeap::new();

    dist_w[s as usize] = 0;
    parent[s as usize] = s;
    heap.push(Reverse((0, s)));

    while let Some(Reverse((du, u))) = heap.pop() {
        if done[u as usize] {
            continue;
        }
        done[u as usize] = true;
        for &e in g.incident(u) {
            if avoid.contains(e) {
                continue;
            }
            let v = g.other_endpoint(e, u);
            let nd = du + pg.weight(e);
            let old = dist_w[v as usize];
            if nd < old {
                dist_w[v as usize] = nd;
                parent[v as usize] = u;
                parent_edge[v as usize] = e;
                heap.push(Reverse((nd, v)));
            } else if nd == old && parent[v as usize] != u {
                return Err(BuildError::TieDetected { src: s, vertex: v });
            }
        }
    }

    let dist_h = dist_w
        .iter()
        .map(|&d| if d == INF_W { INF_H } else { (d / pg.base) as u32 })
        .collect();

    let mut spt = SptCore {
        source: s,
        parent,
        parent_edge,
        dist_w,
        dist_h,
        tin: vec![u32::MAX; n],
        tout: vec![u32::MAX; n],
    };
    euler_tour(&mut spt);
    Ok(spt)
}

pub fn build_spt(pg: &PerturbedGraph, s: Vertex) -> Result<SptCore, BuildError> {
    dijkstra_avoiding(pg, s, &FaultSet::empty())
}

fn euler_tour(spt: &mut SptCore) {
    let n = spt.parent.len();
    let mut children: Vec<Vec<Vertex>> = vec![Vec::new(); n];
    for v in 0..n as Vertex {
        if spt.reachable(v) && v != spt.source {
            children[spt.parent[v as usize] as usize].push(v);
        }
    }
    // Iterative DFS; child order by vertex id keeps reruns deterministic.
    let mut clock = 0u32;
    let mut stack: Vec<(Vertex, usize)> = vec![(spt.source, 0)];
    spt.tin[spt.source as usize] = clock;
    clock += 1;
    while let Some(&mut (v, ref mut idx)) = stack.last_mut() {
        if *idx < children[v as usize].len() {
            let c = children[v as usize][*idx];
            *idx += 1;
            spt.tin[c as usize] = clock;
            clock += 1;
            stack.push((c, 0));
        } else {
            spt.tout[v as usize] = clock;
            stack.pop();
        }
    }
}

/// Sparse-table range-minimum over the Euler tour of one tree: O(1) LCA.
#[derive(Debug, Clone)]
pub struct LcaIndex {
    first: Vec<u32>,
    /// (depth, vertex) per tour position; table[k] holds minima over 2^k windows.
    table: Vec<Vec<(u32, Vertex)>>,
}

impl LcaIndex {
    pub fn build(spt: &SptCore) -> Self {
        let n = spt.parent.len();
        let mut tour: Vec<(u32, Vertex)> = Vec::with_capacity(2 * n);
        let mut first = vec![u32::MAX; n];
        let mut children: Vec<Vec<Vertex>> = vec![Vec::new(); n];
        for v in 0..n as Vertex {
            if spt.reachable(v) && v != spt.source {
                children[spt.parent[v as usize] as usize].push(v);
            }
        }
        // Euler walk recording every visit of a vertex.
        let mut stack: Vec<(Vertex, usize)> = vec![(spt.source, 0)];
        first[spt.source as usize] = 0;
        tour.push((spt.dist_h[spt.source as usize], spt.source));
        while let Some(&mut (v, ref mut idx)) = stack.last_mut() {
            if *idx < children[v as usize].len() {
                let c = children[v as usize][*idx];
                *idx += 1;
                first[c as usize] = tour.len() as u32;
                tour.push((spt.dist_h[c as usize], c));
                stack.push((c, 0));
            } else {
                stack.pop();
                if let Some(&(p, _)) = stack.last() {
                    tour.push((spt.dist_h[p as usize], p));
                }
            }
        }

        let levels = usize::BITS as usize - tour.len().leading_zeros() as usize;
        let mut table = Vec::with_capacity(levels);
        table.push(tour);
        let mut k = 1;
        while (1 << k) <= table[0].len() {
            let len = table[0].len() - (1 << k) + 1;
            let prev = &table[k - 1];
            let mut row = Vec::with_capacity(len);
            for i in 0..len {
                row.push(prev[i].min(prev[i + (1 << (k - 1))]));
            }
            table.push(row);
            k += 1;
        }
        LcaIndex { first, table }
    }

    /// Lowest common ancestor of u and v; None if either is unreachable.
    pub fn lca(&self, u: Vertex, v: Vertex) -> Option<Vertex> {
        let fu = self.first[u as usize];
        let fv = self.first[v as usize];
        if fu == u32::MAX || fv == u32::MAX {
            return None;
        }
        let (lo, hi) = (fu.min(fv) as usize, fu.max(fv) as usize);
        let len = hi - lo + 1;
        let k = usize::BITS as usize - 1 - len.leading_zeros() as usize;
        let best = self.table[k][lo].min(self.table[k][hi + 1 - (1 << k)]);
        Some(best.1)
    }
}

/// True iff `e` lies on the unique shortest s–t path, decided by the
/// perturbed-weight identity |st| = |s·x| + w(e) + |y·t| over both pairings
/// of e's endpoints.
pub fn edge_on_path(
    pg: &PerturbedGraph,
    spts: &[SptCore],
    s: Vertex,
    t: Vertex,
    e: EdgeId,
) -> bool {
    let ds = &spts[s as usize];
    let dt = &spts[t as usize];
    if ds.dist_w[t as usize] == INF_W {
        return false;
    }
    let (x, y) = pg.graph.endpoints(e);
    let w = pg.weight(e);
    let total = ds.dist_w[t as usize];
    let check = |p: Vertex, q: Vertex| {
        ds.reachable(p)
            && dt.reachable(q)
            && ds.dist_w[p as usize] + w + dt.dist_w[q as usize] == total
    };
    check(x, y) || check(y, x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::perturb;
    use crate::testutil::{c5, k4, p4, spts_for};

    #[test]
    fn c5_hop_distances() {
        let pg = perturb(c5(), 1);
        let spt = build_spt(&pg, 0).unwrap();
        assert_eq!(spt.dist_h, vec![0, 1, 2, 2, 1]);
    }

    #[test]
    fn p4_parent_chain() {
        let pg = perturb(p4(), 1);
        let spt = build_spt(&pg, 0).unwrap();
        assert_eq!(spt.parent, vec![0, 0, 1, 2]);
        assert_eq!(spt.dist_h, vec![0, 1, 2, 3]);
    }

    #[test]
    fn k4_all_neighbors() {
        let pg = perturb(k4(), 3);
        let spt = build_spt(&pg, 0).unwrap();
        for t in 1..4 {
            assert_eq!(spt.dist_h[t], 1);
        }
    }

    #[test]
    fn hop_equals_weight_quotient() {
        for seed in 0..5 {
            for g in [p4(), c5(), k4()] {
                let pg = perturb(g, seed);
                for s in 0..pg.n() {
                    let spt = build_spt(&pg, s).unwrap();
                    for v in 0..pg.n() as usize {
                        assert_eq!(spt.dist_h[v] as u64, spt.dist_w[v] / pg.base);
                    }
                }
            }
        }
    }

    #[test]
    fn detects_forced_tie() {
        // C4 with all perturbations equal: the vertex opposite the source has
        // two equal-weight predecessors.
        let g = crate::graph::Graph::new(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let mut pg = perturb(g, 0);
        for r in pg.perturbation.iter_mut() {
            *r = 5;
        }
        assert!(matches!(
            build_spt(&pg, 0),
            Err(BuildError::TieDetected { .. })
        ));
    }

    #[test]
    fn euler_intervals_match_ancestry() {
        let pg = perturb(c5(), 2);
        let spt = build_spt(&pg, 0).unwrap();
        // Naive ancestor check by parent walking.
        let naive = |a: Vertex, d: Vertex| {
            let mut cur = d;
            loop {
                if cur == a {
                    return true;
                }
                if cur == spt.source {
                    return false;
                }
                cur = spt.parent[cur as usize];
            }
        };
        for a in 0..5 {
            for d in 0..5 {
                assert_eq!(spt.is_ancestor(a, d), naive(a, d), "a={a} d={d}");
            }
        }
    }

    #[test]
    fn lca_matches_naive_walk() {
        for seed in 0..4 {
            for g in [p4(), c5(), k4()] {
                let pg = perturb(g, seed);
                for s in 0..pg.n() {
                    let spt = build_spt(&pg, s).unwrap();
                    let idx = LcaIndex::build(&spt);
                    for u in 0..pg.n() {
                        for v in 0..pg.n() {
                            let mut pu = spt.path_to(u);
                            let pv = spt.path_to(v);
                            pu.retain(|x| pv.contains(x));
                            let expect = *pu.last().unwrap();
                            assert_eq!(idx.lca(u, v), Some(expect));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn lca_identity_and_chain() {
        let pg = perturb(p4(), 1);
        let spt = build_spt(&pg, 0).unwrap();
        let idx = LcaIndex::build(&spt);
        assert_eq!(idx.lca(2, 3), Some(2));
        for v in 0..4 {
            assert_eq!(idx.lca(v, v), Some(v));
        }
    }

    #[test]
    fn disconnected_vertices_are_flagged() {
        let g = crate::graph::Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        let pg = perturb(g, 1);
        let spt = build_spt(&pg, 0).unwrap();
        assert!(!spt.reachable(2));
        assert_eq!(spt.dist_h[2], INF_H);
        let idx = LcaIndex::build(&spt);
        assert_eq!(idx.lca(0, 2), None);
    }

    #[test]
    fn edge_on_path_examples() {
        let (pg, spts) = spts_for(p4(), 1);
        assert!(edge_on_path(&pg, &spts, 0, 3, 1)); // (1,2) on 0→3
        let (pg, spts) = spts_for(k4(), 1);
        let e23 = pg.graph.edge_id(2, 3).unwrap();
        assert!(!edge_on_path(&pg, &spts, 0, 1, e23));
        let e01 = pg.graph.edge_id(0, 1).unwrap();
        assert!(edge_on_path(&pg, &spts, 0, 1, e01));
    }

    #[test]
    fn edge_on_path_agrees_with_tree_membership() {
        for seed in 0..4 {
            for g in [p4(), c5(), k4()] {
                let (pg, spts) = spts_for(g, seed);
                for s in 0..pg.n() {
                    for t in 0..pg.n() {
                        for e in 0..pg.graph.m() {
                            let via_tree = spts[s as usize]
                                .edge_on_root_path(&pg.graph, e, t);
                            let via_identity = edge_on_path(&pg, &spts, s, t, e);
                            assert_eq!(via_tree, via_identity, "s={s} t={t} e={e}");
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn intactness_examples() {
        let (pg, spts) = spts_for(p4(), 1);
        let g = &pg.graph;
        let t0 = &spts[0];
        let f12 = FaultSet::new(g, &[1]); // edge (1,2)
        let f23 = FaultSet::new(g, &[2]); // edge (2,3)
        assert!(t0.prefix_intact(1, &f12));
        assert!(!t0.prefix_intact(3, &f12)); // 1 and 2 interior on 0→3
        assert!(t0.prefix_intact(2, &f23)); // 2 is x itself, 3 not interior
        assert!(!t0.subtree_intact(1, &f23)); // 2,3 below 1
        assert!(t0.subtree_intact(3, &FaultSet::empty()));
        assert!(!t0.is_clean(1, &f23));
        assert!(t0.is_clean(1, &FaultSet::empty()));
    }

    #[test]
    fn intactness_matches_literal_scans() {
        for seed in 0..4 {
            for g in [p4(), c5(), k4()] {
                let (pg, spts) = spts_for(g, seed);
                let gr = &pg.graph;
                for s in 0..pg.n() {
                    let spt = &spts[s as usize];
                    for x in 0..pg.n() {
                        for e1 in 0..gr.m() {
                            for e2 in e1..gr.m() {
                                let f = FaultSet::new(gr, &[e1, e2]);
                                let path = spt.path_to(x);
                                let interior: &[Vertex] = if path.len() >= 2 {
                                    &path[1..path.len() - 1]
                                } else {
                                    &[]
                                };
                                let pref = !f
                                    .endpoints()
                                    .any(|w| interior.contains(&w));
                                assert_eq!(spt.prefix_intact(x, &f), pref);
                                let sub = !f.endpoints().any(|w| {
                                    spt.reachable(w)
                                        && spt.path_to(w).contains(&x)
                                });
                                assert_eq!(spt.subtree_intact(x, &f), sub);
                            }
                        }
                    }
                }
            }
        }
    }
}
