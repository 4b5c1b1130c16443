//! Deterministic graph generation and the plain-text edge-list format.
//!
//!     cargo run --example generate_graphs

use ftdo::gen;
use ftdo::graph::{load_graph, write_edge_list};

fn main() {
    for (name, g) in [
        ("path(4)", gen::path(4)),
        ("cycle(5)", gen::cycle(5)),
        ("complete(4)", gen::complete(4)),
        ("grid(3,3)", gen::grid(3, 3)),
        ("gnp(20,0.2,seed=3)", gen::gnp(20, 0.2, 3, false)),
        ("cycle_with_chords(16,3,seed=1)", gen::cycle_with_chords(16, 3, 1)),
    ] {
        println!("{name}: n={} m={}", g.n(), g.m());
    }

    // Round-trip through the text format: "n m" header then one edge a line.
    let g = gen::gnp(12, 0.3, 5, false);
    let text = write_edge_list(&g);
    println!("--- gnp(12,0.3,seed=5) as edge list ---\n{text}");
    let back = load_graph(text.as_bytes()).unwrap();
    assert_eq!(g.edge_list(), back.edge_list());
    println!("round-trip ok");
}
