//! Build an oracle over a small graph and answer queries under zero, one,
//! and two edge faults.
//!
//!     cargo run --example build_and_query

use ftdo::config::Config;
use ftdo::gen;
use ftdo::graph::INF_H;
use ftdo::oracle::Oracle;
use ftdo::query;

fn show(d: u32) -> String {
    if d == INF_H {
        "INF".into()
    } else {
        d.to_string()
    }
}

fn main() {
    // 5-cycle: 0-1-2-3-4-0.
    let g = gen::cycle(5);
    let o = Oracle::build(g, Config::default()).unwrap();

    let no_faults = o.fault_set(&[]);
    let out = query::query(&o, 0, 2, &no_faults);
    println!(
        "dist(0,2)            = {} ({} probes)",
        show(out.distance),
        out.probes
    );

    // Cutting 0-1 forces the long way round.
    let e01 = o.pg.graph.edge_id(0, 1).unwrap();
    let one = o.fault_set(&[e01]);
    println!(
        "dist(0,2) - {{01}}     = {}",
        show(query::query(&o, 0, 2, &one).distance)
    );

    // Cutting 0-1 and 3-4 disconnects 2 from 0.
    let e34 = o.pg.graph.edge_id(3, 4).unwrap();
    let two = o.fault_set(&[e01, e34]);
    let out = query::query(&o, 0, 2, &two);
    println!(
        "dist(0,2) - {{01,34}}  = {} (certified: {})",
        show(out.distance),
        out.certified
    );

    // A denser random graph: every two-fault query stays exact.
    let g = gen::gnp(40, 0.15, 7, false);
    let o = Oracle::build(g, Config::default()).unwrap();
    let f = o.fault_set(&[0, 1]);
    let out = query::query(&o, 0, (o.n() - 1) as u32, &f);
    println!(
        "gnp(40): dist(0,{}) - two faults = {} ({} probes, certified: {})",
        o.n() - 1,
        show(out.distance),
        out.probes,
        out.certified
    );
}
