//! Reference fixtures and small helpers shared by unit, property, and
//! acceptance tests.

use crate::graph::{perturb, Graph, PerturbedGraph, Vertex};
use crate::spt::{build_spt, SptCore};

/// Path 0-1-2-3.
pub fn p4() -> Graph {
    Graph::new(4, &[(0, 1), (1, 2), (2, 3)]).unwrap()
}

/// Cycle 0-1-2-3-4-0. Edge ids: (0,1)=0, (1,2)=1, (2,3)=2, (3,4)=3, (0,4)=4.
pub fn c5() -> Graph {
    Graph::new(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]).unwrap()
}

/// Complete graph on 4 vertices.
pub fn k4() -> Graph {
    Graph::new(4, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
}

/// w×h grid, vertex (r, c) = r*w + c.
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

/// Perturb and build all SPTs, bumping the seed past any tie.
pub fn spts_for(g: Graph, seed: u64) -> (PerturbedGraph, Vec<SptCore>) {
    let mut seed = seed;
    loop {
        let pg = perturb(g.clone(), seed);
        let mut spts = Vec::with_capacity(pg.n() as usize);
        let mut ok = true;
        for s in 0..pg.n() as Vertex {
            match build_spt(&pg, s) {
                Ok(spt) => spts.push(spt),
                Err(_) => {
                    ok = false;
                    break;
                }
            }
        }
        if ok {
            return (pg, spts);
        }
        seed += 1;
    }
}
