//! Save a built oracle to the versioned binary snapshot format and load it
//! back; derived structures are rebuilt deterministically, so the round trip
//! is byte-identical.
//!
//!     cargo run --example snapshot_roundtrip

use ftdo::config::Config;
use ftdo::gen;
use ftdo::oracle::Oracle;
use ftdo::query;
use ftdo::snapshot;

fn main() {
    let g = gen::gnp(30, 0.15, 4, false);
    let a = Oracle::build(g, Config::default()).unwrap();

    let mut bytes = Vec::new();
    snapshot::save(&a, &mut bytes).unwrap();
    println!("snapshot: {} bytes for n={} m={}", bytes.len(), a.n(), a.pg.graph.m());

    let b = snapshot::load(&mut bytes.as_slice()).unwrap();
    assert_eq!(a.spts, b.spts);
    assert_eq!(a.registry.tables(), b.registry.tables());

    let mut bytes2 = Vec::new();
    snapshot::save(&b, &mut bytes2).unwrap();
    assert_eq!(bytes, bytes2);
    println!("re-serialization byte-identical");

    // Loaded oracle answers identically.
    let f = a.fault_set(&[0, 1]);
    for s in 0..a.n() {
        assert_eq!(
            query::query(&a, s, 0, &f).distance,
            query::query(&b, s, 0, &f).distance
        );
    }
    println!("loaded oracle agrees on all queries");
}
