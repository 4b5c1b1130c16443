use serde::{Deserialize, Serialize};

/// Build- and query-time knobs. Defaults follow the hardened profile:
/// landmark misses degrade to uncertified answers instead of errors.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Config {
    pub seed: u64,
    /// Landmark sampling constant c (level i keeps a vertex w.p. min(1, c·log₂n/2^i)).
    pub landmark_c: f64,
    /// Geometric-prefix base for the trapezoid argument.
    pub epsilon: f64,
    /// Strict mode: landmark misses and absent keys become errors.
    pub strict: bool,
    /// Abort a build whose registry would exceed this many pair records.
    pub mem_cap_records: u64,
    /// Worker threads for the build sweeps.
    pub jobs: usize,
    /// D-closeness bound: a walk target y is accepted as D-close at level ℓ
    /// only while |y·e| ≤ dclose_factor · 2^ℓ.
    pub dclose_factor: u32,
    /// Cap on case-flipping chain steps per top-level query.
    pub max_reroutes: u32,
    /// Perturbation seeds tried before giving up on tie-free trees.
    pub tie_retries: u32,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            seed: 1,
            landmark_c: 4.0,
            epsilon: 0.25,
            strict: false,
            mem_cap_records: 100_000_000,
            jobs: 1,
            dclose_factor: 4,
            max_reroutes: 4,
            tie_retries: 64,
        }
    }
}

impl Config {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.epsilon > 0.0 && self.epsilon <= 1.0) {
            return Err(format!("epsilon must be in (0, 1], got {}", self.epsilon));
        }
        if self.landmark_c < 1.0 {
            return Err(format!("landmark c must be >= 1, got {}", self.landmark_c));
        }
        Ok(())
    }
}
