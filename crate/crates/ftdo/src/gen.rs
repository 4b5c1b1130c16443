//! Deterministic graph generators for tests, benchmarks, and the CLI.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::{Graph, Vertex};

/// G(n, p): each unordered pair is an edge independently with probability p.
/// By default the result is restricted to its largest connected component
/// (vertices relabelled 0..k); pass `keep_all` to skip that.
pub fn gnp(n: u32, p: f64, seed: u64, keep_all: bool) -> Graph {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen::<f64>() < p {
                edges.push((u, v));
            }
        }
    }
    let g = Graph::new(n, &edges).unwrap();
    if keep_all {
        g
    } else {
        largest_component(&g)
    }
}

/// Largest connected component, vertices relabelled to 0..k preserving order.
pub fn largest_component(g: &Graph) -> Graph {
    let n = g.n() as usize;
    let mut comp = vec![u32::MAX; n];
    let mut sizes = Vec::new();
    for start in 0..n {
        if comp[start] != u32::MAX {
            continue;
        }
        let id = sizes.len() as u32;
        let mut stack = vec![start as Vertex];
        comp[start] = id;
        let mut size = 0u32;
        while let Some(u) = stack.pop() {
            size += 1;
            for &e in g.incident(u) {
                let v = g.other_endpoint(e, u);
                if comp[v as usize] == u32::MAX {
                    comp[v as usize] = id;
                    stack.push(v);
                }
            }
        }
        sizes.push(size);
    }
    if sizes.is_empty() {
        return Graph::new(0, &[]).unwrap();
    }
    let best = (0..sizes.len()).max_by_key(|&i| sizes[i]).unwrap() as u32;
    let mut relabel = vec![u32::MAX; n];
    let mut next = 0u32;
    for v in 0..n {
        if comp[v] == best {
            relabel[v] = next;
            next += 1;
        }
    }
    let edges: Vec<(Vertex, Vertex)> = g
        .edge_list()
        .iter()
        .filter(|&&(u, v)| comp[u as usize] == best && comp[v as usize] == best)
        .map(|&(u, v)| (relabel[u as usize], relabel[v as usize]))
        .collect();
    Graph::new(next, &edges).unwrap()
}

pub fn path(n: u32) -> Graph {
    Graph::new(n, &(0..n.saturating_sub(1)).map(|i| (i, i + 1)).collect::<Vec<_>>()).unwrap()
}

pub fn cycle(n: u32) -> Graph {
    assert!(n >= 3, "cycle needs at least 3 vertices");
    let mut edges: Vec<(Vertex, Vertex)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    edges.push((0, n - 1));
    Graph::new(n, &edges).expect("generator produced invalid edges")
}

pub fn complete(n: u32) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    Graph::new(n, &edges).expect("generator produced invalid edges")
}

/// w×h grid; vertex (row r, col c) is r·w + c.
pub fn grid(w: u32, h: u32) -> Graph {
    let mut edges = Vec::new();
    for r in 0..h {
        for c in 0..w {
            let v = r * w + c;
            if c + 1 < w {
                edges.push((v, v + 1));
            }
            if r + 1 < h {
                edges.push((v, v + w));
            }
        }
    }
    Graph::new(w * h, &edges).unwrap()
}

/// Long cycle with a few random chords: forces long detours whose midpoints
/// sit far from both faults, the regime where the chained maximisers fire.
pub fn cycle_with_chords(n: u32, chords: u32, seed: u64) -> Graph {
    assert!(n >= 4);
    let mut g: Vec<(Vertex, Vertex)> = (0..n - 1).map(|i| (i, i + 1)).collect();
    g.push((0, n - 1));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut have: std::collections::HashSet<(u32, u32)> =
        g.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
    let mut added = 0;
    let mut attempts = 0;
    while added < chords && attempts < 100 * chords {
        attempts += 1;
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u == v {
            continue;
        }
        let key = (u.min(v), u.max(v));
        if have.insert(key) {
            g.push(key);
            added += 1;
        }
    }
    Graph::new(n, &g).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gnp_is_deterministic() {
        let a = gnp(30, 0.2, 7, false);
        let b = gnp(30, 0.2, 7, false);
        assert_eq!(a.edge_list(), b.edge_list());
    }

    #[test]
    fn gnp_component_is_connected() {
        let g = gnp(40, 0.1, 3, false);
        assert!(g.n() > 0);
        let f = crate::fault::FaultSet::empty();
        let d = crate::verify::brute_dist_vector(&g, 0, &f);
        assert!(d.iter().all(|&x| x != crate::graph::INF_H));
    }

    #[test]
    fn fixed_shapes() {
        assert_eq!(path(4).m(), 3);
        assert_eq!(cycle(5).m(), 5);
        assert_eq!(complete(4).m(), 6);
        assert_eq!(grid(3, 3).m(), 12);
        let g = cycle_with_chords(20, 3, 1);
        assert_eq!(g.n(), 20);
        assert_eq!(g.m(), 23);
    }

    #[test]
    fn extremes() {
        assert_eq!(gnp(10, 0.0, 1, true).m(), 0);
        assert_eq!(gnp(10, 1.0, 1, true).m(), 45);
        assert_eq!(path(1).m(), 0);
    }
}
