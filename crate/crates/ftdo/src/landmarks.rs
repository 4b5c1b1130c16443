//! Sampled landmark hierarchy L_0 … L_⌈log n⌉ and the path-hitting walks
//! that promote maximiser outputs to close/D-close vertices.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::graph::Vertex;
use crate::spt::SptCore;

#[derive(Debug, Clone, PartialEq)]
pub struct LandmarkSets {
    n: u32,
    pub c: f64,
    pub seed: u64,
    /// One membership bitset per level, packed 64 vertices per word.
    levels: Vec<Vec<u64>>,
}

fn level_count(n: u32) -> u32 {
    if n <= 1 {
        1
    } else {
        (n as f64).log2().ceil() as u32 + 1
    }
}

/// Membership probability at level i: min(1, c·log₂n / 2^i).
pub fn level_probability(n: u32, c: f64, level: u32) -> f64 {
    if n <= 1 {
        return 1.0;
    }
    (c * (n as f64).log2() / (1u64 << level) as f64).min(1.0)
}

pub fn sample_landmarks(n: u32, c: f64, seed: u64) -> LandmarkSets {
    assert!(c >= 1.0, "sampling constant must be at least 1");
    let words = (n as usize + 63) / 64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut levels = Vec::new();
    for level in 0..level_count(n) {
        let p = level_probability(n, c, level);
        let mut bits = vec![0u64; words];
        for v in 0..n as usize {
            if p >= 1.0 || rng.gen::<f64>() < p {
                bits[v / 64] |= 1 << (v % 64);
            }
        }
        levels.push(bits);
    }
    LandmarkSets { n, c, seed, levels }
}

impl LandmarkSets {
    pub fn from_levels(n: u32, c: f64, seed: u64, levels: Vec<Vec<u64>>) -> Self {
        LandmarkSets { n, c, seed, levels }
    }

    pub fn level_count(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn levels(&self) -> &[Vec<u64>] {
        &self.levels
    }

    /// Levels beyond the sampled range behave as the sparsest level.
    #[inline]
    fn clamp(&self, level: u32) -> usize {
        (level as usize).min(self.levels.len() - 1)
    }

    #[inline]
    pub fn is_member(&self, level: u32, v: Vertex) -> bool {
        let bits = &self.levels[self.clamp(level)];
        bits[v as usize / 64] >> (v as usize % 64) & 1 == 1
    }

    pub fn cardinality(&self, level: u32) -> u32 {
        self.levels[self.clamp(level)]
            .iter()
            .map(|w| w.count_ones())
            .sum()
    }

    pub fn cardinalities(&self) -> Vec<u32> {
        (0..self.level_count()).map(|l| self.cardinality(l)).collect()
    }
}

/// Result of a budgeted landmark walk. `fallback` is the farthest vertex the
/// walk visited (used by hardened mode when no member was found).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WalkOutcome {
    pub found: Option<Vertex>,
    pub fallback: Vertex,
}

/// First L_level member within `budget` hops of x on the tree path x→source,
/// scanning from x upward (x itself counts).
pub fn landmark_toward_source(
    lm: &LandmarkSets,
    spt: &SptCore,
    x: Vertex,
    level: u32,
    budget: u32,
) -> WalkOutcome {
    debug_assert!(spt.reachable(x));
    let mut cur = x;
    let mut hops = 0;
    loop {
        if lm.is_member(level, cur) {
            return WalkOutcome { found: Some(cur), fallback: cur };
        }
        if cur == spt.source || hops == budget {
            return WalkOutcome { found: None, fallback: cur };
        }
        cur = spt.parent[cur as usize];
        hops += 1;
    }
}

/// First L_level member within `budget` hops of the source on the tree path
/// source→x, scanning from the source toward x.
pub fn landmark_from_source(
    lm: &LandmarkSets,
    spt: &SptCore,
    x: Vertex,
    level: u32,
    budget: u32,
) -> WalkOutcome {
    debug_assert!(spt.reachable(x));
    let path = spt.path_to(x);
    let last = (budget as usize).min(path.len() - 1);
    for &v in &path[..=last] {
        if lm.is_member(level, v) {
            return WalkOutcome { found: Some(v), fallback: path[last] };
        }
    }
    WalkOutcome { found: None, fallback: path[last] }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::perturb;
    use crate::spt::build_spt;
    use crate::testutil::p4;

    #[test]
    fn level_zero_is_clamped_to_all() {
        let lm = sample_landmarks(16, 4.0, 9);
        assert_eq!(lm.level_count(), 5);
        assert_eq!(lm.cardinality(0), 16);
        // c·log₂n = 16 ≥ 2^4, so even the top level is clamped at n = 16.
        assert_eq!(lm.cardinality(4), 16);
    }

    #[test]
    fn sparse_levels_appear_for_larger_n() {
        let lm = sample_landmarks(256, 4.0, 9);
        assert_eq!(lm.level_count(), 9);
        // p(8) = 32/256 = 1/8: expect far fewer than all vertices.
        assert!(lm.cardinality(8) < 256);
        assert!(level_probability(256, 4.0, 8) < 1.0);
    }

    #[test]
    fn seeds_change_membership_not_shape() {
        let a = sample_landmarks(256, 4.0, 1);
        let b = sample_landmarks(256, 4.0, 2);
        assert_eq!(a.level_count(), b.level_count());
        assert_ne!(a.levels(), b.levels());
        let a2 = sample_landmarks(256, 4.0, 1);
        assert_eq!(a.levels(), a2.levels());
    }

    #[test]
    fn walks() {
        let pg = perturb(p4(), 1);
        let spt = build_spt(&pg, 0).unwrap();

        // Clamped level: immediate hit at x.
        let full = sample_landmarks(4, 4.0, 1);
        assert_eq!(
            landmark_toward_source(&full, &spt, 3, 0, 0).found,
            Some(3)
        );

        // Forced membership {1}: ancestors of 3 within 2 hops are {3,2,1}.
        let only1 = LandmarkSets::from_levels(4, 4.0, 0, vec![vec![0b0010u64]]);
        let out = landmark_toward_source(&only1, &spt, 3, 0, 2);
        assert_eq!(out.found, Some(1));
        let short = landmark_toward_source(&only1, &spt, 3, 0, 1);
        assert_eq!(short.found, None);
        assert_eq!(short.fallback, 2);

        // Forced empty set: absent, fallback is the source end of the walk.
        let none = LandmarkSets::from_levels(4, 4.0, 0, vec![vec![0u64]]);
        let out = landmark_toward_source(&none, &spt, 3, 0, 4);
        assert_eq!(out.found, None);
        assert_eq!(out.fallback, 0);

        // From the source: path 0→3 scanned forward.
        let out = landmark_from_source(&only1, &spt, 3, 0, 3);
        assert_eq!(out.found, Some(1));
        let out = landmark_from_source(&none, &spt, 3, 0, 2);
        assert_eq!(out.found, None);
        assert_eq!(out.fallback, 2);
    }
}
