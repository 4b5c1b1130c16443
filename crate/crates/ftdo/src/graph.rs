//! Undirected simple graphs with stable edge ids, plus the tie-breaking
//! weight perturbation that makes every shortest path unique.

use std::collections::HashSet;
use std::io::BufRead;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::ParseError;

pub type Vertex = u32;
pub type EdgeId = u32;

/// Hop-distance infinity: compares greater than every finite hop count and is
/// kept absorbing under addition by `add_hops`.
pub const INF_H: u32 = u32::MAX;
/// Weighted-distance infinity.
pub const INF_W: u64 = u64::MAX;
pub const NO_VERTEX: Vertex = u32::MAX;
pub const NO_EDGE: EdgeId = u32::MAX;

/// Saturating sum that treats `INF_H` as absorbing.
#[inline]
pub fn add_hops(a: u32, b: u32) -> u32 {
    if a == INF_H || b == INF_H {
        INF_H
    } else {
        a + b
    }
}

#[derive(Debug, Clone)]
pub struct Graph {
    n: u32,
    edges: Vec<(Vertex, Vertex)>,
    adjacency: Vec<Vec<EdgeId>>,
}

impl Graph {
    pub fn new(n: u32, edge_list: &[(Vertex, Vertex)]) -> Result<Self, ParseError> {
        let mut g = Graph {
            n,
            edges: Vec::with_capacity(edge_list.len()),
            adjacency: vec![Vec::new(); n as usize],
        };
        let mut seen = HashSet::new();
        for (i, &(u, v)) in edge_list.iter().enumerate() {
            g.push_edge(u, v, i + 1, &mut seen)?;
        }
        Ok(g)
    }

    fn push_edge(
        &mut self,
        u: Vertex,
        v: Vertex,
        line: usize,
        seen: &mut HashSet<(Vertex, Vertex)>,
    ) -> Result<(), ParseError> {
        if u >= self.n || v >= self.n {
            let bad = if u >= self.n { u } else { v };
            return Err(ParseError::VertexOutOfRange {
                line,
                v: bad as u64,
                n: self.n,
            });
        }
        if u == v {
            return Err(ParseError::SelfLoop { line, v: u });
        }
        let key = (u.min(v), u.max(v));
        if !seen.insert(key) {
            return Err(ParseError::DuplicateEdge { line, u, v });
        }
        let id = self.edges.len() as EdgeId;
        self.edges.push(key);
        self.adjacency[u as usize].push(id);
        self.adjacency[v as usize].push(id);
        Ok(())
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.n
    }

    #[inline]
    pub fn m(&self) -> u32 {
        self.edges.len() as u32
    }

    #[inline]
    pub fn endpoints(&self, e: EdgeId) -> (Vertex, Vertex) {
        self.edges[e as usize]
    }

    #[inline]
    pub fn other_endpoint(&self, e: EdgeId, v: Vertex) -> Vertex {
        let (a, b) = self.endpoints(e);
        if a == v {
            b
        } else {
            a
        }
    }

    #[inline]
    pub fn incident(&self, v: Vertex) -> &[EdgeId] {
        &self.adjacency[v as usize]
    }

    pub fn edge_list(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn edge_id(&self, u: Vertex, v: Vertex) -> Option<EdgeId> {
        if u >= self.n || v >= self.n {
            return None;
        }
        let key = (u.min(v), u.max(v));
        self.adjacency[u as usize]
            .iter()
            .copied()
            .find(|&e| self.edges[e as usize] == key)
    }
}

/// Parse the edge-list text format: header `n m`, then `m` lines `u v`.
/// `#` starts a comment; blank lines are skipped.
pub fn load_graph<R: BufRead>(reader: R) -> Result<Graph, ParseError> {
    let mut header: Option<(u32, usize)> = None;
    let mut graph: Option<Graph> = None;
    let mut seen = HashSet::new();
    let mut found = 0usize;

    for (lineno, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| ParseError::Malformed {
            line: lineno + 1,
            msg: e.to_string(),
        })?;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let mut fields = body.split_whitespace().map(|f| {
            f.parse::<u64>().map_err(|_| ParseError::Malformed {
                line: lineno + 1,
                msg: format!("expected integer, got {f:?}"),
            })
        });
        let a = fields.next().ok_or(ParseError::Malformed {
            line: lineno + 1,
            msg: "missing field".into(),
        })??;
        let b = fields.next().ok_or(ParseError::Malformed {
            line: lineno + 1,
            msg: "missing field".into(),
        })??;
        if fields.next().is_some() {
            return Err(ParseError::Malformed {
                line: lineno + 1,
                msg: "trailing fields".into(),
            });
        }
        match (&header, &mut graph) {
            (None, _) => {
                let n = u32::try_from(a).map_err(|_| ParseError::Malformed {
                    line: lineno + 1,
                    msg: "vertex count too large".into(),
                })?;
                header = Some((n, b as usize));
                graph = Some(Graph {
                    n,
                    edges: Vec::with_capacity(b as usize),
                    adjacency: vec![Vec::new(); n as usize],
                });
            }
            (Some((n, _)), Some(g)) => {
                if a >= *n as u64 || b >= *n as u64 {
                    return Err(ParseError::VertexOutOfRange {
                        line: lineno + 1,
                        v: a.max(b),
                        n: *n,
                    });
                }
                g.push_edge(a as Vertex, b as Vertex, lineno + 1, &mut seen)?;
                found += 1;
            }
            _ => unreachable!(),
        }
    }

    let (_, m) = header.ok_or(ParseError::Malformed {
        line: 0,
        msg: "empty input".into(),
    })?;
    if found != m {
        return Err(ParseError::EdgeCountMismatch {
            expected: m,
            found,
        });
    }
    Ok(graph.unwrap())
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.n(), g.m());
    for &(u, v) in g.edge_list() {
        out.push_str(&format!("{u} {v}\n"));
    }
    out
}

/// `G′`: hop weights plus tiny i.i.d. perturbations. With base `B = n³` and
/// `r_e ∈ [1, n²)`, any path with fewer hops is strictly lighter than any path
/// with more, so `hops = floor(dist_w / B)` always holds; the perturbations
/// only break ties among equal-hop paths.
#[derive(Debug, Clone)]
pub struct PerturbedGraph {
    pub graph: Graph,
    pub base: u64,
    pub perturbation: Vec<u64>,
    pub seed: u64,
}

impl PerturbedGraph {
    #[inline]
    pub fn weight(&self, e: EdgeId) -> u64 {
        self.base + self.perturbation[e as usize]
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.graph.n()
    }
}

pub fn perturb(graph: Graph, seed: u64) -> PerturbedGraph {
    let n = graph.n() as u64;
    let base = n * n * n;
    let hi = (n * n).max(2); // r_e ∈ [1, n²); degenerate n ≤ 1 still gets r_e = 1
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let perturbation = (0..graph.m())
        .map(|_| rng.gen_range(1..hi))
        .collect();
    PerturbedGraph {
        graph,
        base,
        perturbation,
        seed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{c5, k4, p4};

    #[test]
    fn parses_p4() {
        let g = load_graph("4 3\n0 1\n1 2\n2 3\n".as_bytes()).unwrap();
        assert_eq!(g.n(), 4);
        assert_eq!(g.m(), 3);
        assert_eq!(g.endpoints(1), (1, 2));
        assert_eq!(g.incident(1), &[0, 1]);
    }

    #[test]
    fn parses_comments_and_blank_lines() {
        let text = "# C5\n5 5\n0 1\n1 2\n\n2 3 # chord? no\n3 4\n4 0\n";
        let g = load_graph(text.as_bytes()).unwrap();
        assert_eq!(g.m(), 5);
        assert_eq!(g.edge_id(0, 4), Some(4));
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            load_graph("3 1\n1 1\n".as_bytes()),
            Err(ParseError::SelfLoop { .. })
        ));
        assert!(matches!(
            load_graph("3 2\n0 1\n1 0\n".as_bytes()),
            Err(ParseError::DuplicateEdge { .. })
        ));
        assert!(matches!(
            load_graph("3 1\n0 5\n".as_bytes()),
            Err(ParseError::VertexOutOfRange { .. })
        ));
        assert!(matches!(
            load_graph("3 2\n0 1\n".as_bytes()),
            Err(ParseError::EdgeCountMismatch { .. })
        ));
        assert!(matches!(
            load_graph("3 1\nx y\n".as_bytes()),
            Err(ParseError::Malformed { .. })
        ));
    }

    #[test]
    fn fixtures_have_expected_shape() {
        assert_eq!(p4().m(), 3);
        assert_eq!(c5().m(), 5);
        let k = k4();
        assert_eq!(k.m(), 6);
        for v in 0..4 {
            assert_eq!(k.incident(v).len(), 3);
        }
    }

    #[test]
    fn roundtrips_edge_list_text() {
        let g = c5();
        let g2 = load_graph(write_edge_list(&g).as_bytes()).unwrap();
        assert_eq!(g.edge_list(), g2.edge_list());
    }

    #[test]
    fn perturbation_bounds_p4() {
        // n = 4: B = 64, r_e ∈ [1, 16) so every weight is in [65, 79].
        let pg = perturb(p4(), 12345);
        assert_eq!(pg.base, 64);
        for e in 0..pg.graph.m() {
            let w = pg.weight(e);
            assert!((65..=79).contains(&w), "weight {w} out of bounds");
        }
    }

    #[test]
    fn perturbation_is_reproducible() {
        let a = perturb(c5(), 7);
        let b = perturb(c5(), 7);
        let c = perturb(c5(), 8);
        assert_eq!(a.perturbation, b.perturbation);
        assert_ne!(a.perturbation, c.perturbation);
    }

    #[test]
    fn inf_is_absorbing() {
        assert_eq!(add_hops(INF_H, 3), INF_H);
        assert_eq!(add_hops(3, INF_H), INF_H);
        assert_eq!(add_hops(2, 3), 5);
    }
}
