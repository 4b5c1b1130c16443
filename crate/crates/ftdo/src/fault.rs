//! Fault sets: up to two failed edges, order-insensitive, with cached
//! endpoints so the intactness predicates never touch adjacency lists.

use crate::graph::{EdgeId, Graph, Vertex, NO_EDGE, NO_VERTEX};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct FaultSet {
    items: [(EdgeId, Vertex, Vertex); 2],
    len: u8,
}

impl FaultSet {
    pub fn empty() -> Self {
        FaultSet {
            items: [(NO_EDGE, NO_VERTEX, NO_VERTEX); 2],
            len: 0,
        }
    }

    /// Builds a deduplicated fault set from at most two edge ids.
    pub fn new(g: &Graph, edges: &[EdgeId]) -> Self {
        assert!(edges.len() <= 2, "at most two faults supported");
        let mut fs = Self::empty();
        for &e in edges {
            if fs.contains(e) {
                continue;
            }
            let (u, v) = g.endpoints(e);
            fs.items[fs.len as usize] = (e, u, v);
            fs.len += 1;
        }
        fs
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len as usize
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn contains(&self, e: EdgeId) -> bool {
        (0..self.len as usize).any(|i| self.items[i].0 == e)
    }

    #[inline]
    pub fn edges(&self) -> impl Iterator<Item = EdgeId> + '_ {
        (0..self.len as usize).map(move |i| self.items[i].0)
    }

    pub fn edge_vec(&self) -> Vec<EdgeId> {
        self.edges().collect()
    }

    /// All fault-edge endpoints (up to four vertices, with repeats possible).
    #[inline]
    pub fn endpoints(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.len as usize).flat_map(move |i| [self.items[i].1, self.items[i].2])
    }

    #[inline]
    pub fn get(&self, i: usize) -> (EdgeId, Vertex, Vertex) {
        debug_assert!(i < self.len());
        self.items[i]
    }
}

/// Orientation of a two-fault query in the primary-plus-secondary or
/// both-on-primary case: `e1 = (a, b)` with `a` nearer `s` on the primary
/// path, `e2 = (c, d)` with `c` nearer `s` on the path containing `e2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrientedFaults {
    pub e1: EdgeId,
    pub a: Vertex,
    pub b: Vertex,
    pub e2: EdgeId,
    pub c: Vertex,
    pub d: Vertex,
}
