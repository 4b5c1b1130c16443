//! Landmark level sizes and hit rates: level i keeps each vertex with
//! probability min(1, c·log₂n / 2^i), so a walk of 2^i hops misses a level-i
//! landmark only with polynomially small probability.
//!
//!     cargo run --example landmark_stats

use ftdo::config::Config;
use ftdo::gen;
use ftdo::landmarks::landmark_toward_source;
use ftdo::oracle::Oracle;

fn main() {
    let g = gen::gnp(200, 0.04, 9, false);
    let o = Oracle::build(g, Config::default()).unwrap();
    let n = o.n();
    println!("n = {n}, c = {}", o.config.landmark_c);
    for (i, card) in o.landmarks.cardinalities().iter().enumerate() {
        println!("level {i}: {card} landmarks");
    }

    // Walk from every vertex toward source 0 with the level matched to the
    // walk budget; count misses.
    let spt = &o.spts[0];
    for level in 0..o.landmarks.level_count() {
        let budget = 1u32 << level;
        let mut misses = 0;
        for v in 0..n {
            if spt.reachable(v) && landmark_toward_source(&o.landmarks, spt, v, level, budget).found.is_none() {
                misses += 1;
            }
        }
        println!(
            "level {level} (budget {budget}): {misses}/{n} walks missed"
        );
    }
}
