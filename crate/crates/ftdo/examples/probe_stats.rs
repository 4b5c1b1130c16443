//! Probe-count behaviour over random queries at growing n: the maximum
//! number of registry probes per query stays flat while the graph grows.
//!
//!     cargo run --release --example probe_stats

use ftdo::config::Config;
use ftdo::gen;
use ftdo::oracle::Oracle;
use ftdo::query;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() {
    for &n in &[16u32, 32, 64, 128] {
        let p = 2.0 * (n as f64).ln() / n as f64;
        let g = gen::gnp(n, p, 11, false);
        let t0 = std::time::Instant::now();
        let o = Oracle::build(g, Config::default()).unwrap();
        let build = t0.elapsed();

        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let nn = o.n();
        let m = o.pg.graph.m();
        let (mut pmax, mut psum) = (0u32, 0u64);
        let queries = 10_000;
        let t1 = std::time::Instant::now();
        for _ in 0..queries {
            let s = rng.gen_range(0..nn);
            let t = rng.gen_range(0..nn);
            let f = o.fault_set(&[rng.gen_range(0..m), rng.gen_range(0..m)]);
            let out = query::query(&o, s, t, &f);
            pmax = pmax.max(out.probes);
            psum += out.probes as u64;
        }
        println!(
            "n={nn:>4} m={m:>4} entries={:>7} build={build:>10.2?} probe max={pmax:>4} mean={:>6.3} ({queries} queries in {:.2?})",
            o.registry.counts().total,
            psum as f64 / queries as f64,
            t1.elapsed()
        );
    }
}
