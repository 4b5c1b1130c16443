//! Exhaustively compare the oracle against independent brute-force BFS for
//! every (s, t) pair and every fault set of size ≤ 2.
//!
//!     cargo run --release --example verify_exhaustive

use ftdo::config::Config;
use ftdo::gen;
use ftdo::oracle::Oracle;
use ftdo::verify::{verify_exhaustive, SweepLimits};

fn main() {
    for (name, g) in [
        ("cycle(5)", gen::cycle(5)),
        ("grid(4,4)", gen::grid(4, 4)),
        ("gnp(18,0.2,seed=2)", gen::gnp(18, 0.2, 2, false)),
    ] {
        let o = Oracle::build(g, Config::default()).unwrap();
        let report = verify_exhaustive(&o, SweepLimits::default());
        println!(
            "{name}: {}/{} matched, {} fault sets, probe max {}, mean {:.2}, hard-case queries {}",
            report.matches,
            report.queries,
            report.fault_sets_checked,
            report.probe_max,
            report.probe_mean,
            report.hard_case_queries
        );
        assert!(report.ok(), "mismatches: {:?}", report.mismatches);
    }
    println!("all sweeps exact");
}
