//! Exact distance oracle for undirected unweighted graphs under up to two
//! edge faults: preprocess once, then answer |st ⋄ F| with a constant number
//! of probes into precomputed maximiser tables.
//!
//! Pipeline: perturb the graph so shortest paths are unique → build all
//! shortest-path trees → the single-fault index → sampled landmarks → the
//! maximiser registry. Queries classify the fault configuration, probe the
//! registry through the hit-set flows, and recurse over the returned
//! candidate vertices. See `examples/` for end-to-end usage.

pub mod config;
pub mod error;
pub mod fault;
pub mod gen;
pub mod graph;
pub mod landmarks;
pub mod maximiser;
pub mod oracle;
pub mod query;
pub mod single_fault;
pub mod snapshot;
pub mod spt;
pub mod testutil;
pub mod verify;
