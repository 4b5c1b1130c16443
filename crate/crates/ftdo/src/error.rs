use thiserror::Error;

use crate::graph::Vertex;

#[derive(Debug, Error)]
pub enum ParseError {
    #[error("line {line}: {msg}")]
    Malformed { line: usize, msg: String },
    #[error("line {line}: vertex {v} out of range (n = {n})")]
    VertexOutOfRange { line: usize, v: u64, n: u32 },
    #[error("line {line}: self-loop at vertex {v}")]
    SelfLoop { line: usize, v: Vertex },
    #[error("line {line}: duplicate edge ({u}, {v})")]
    DuplicateEdge { line: usize, u: Vertex, v: Vertex },
    #[error("expected {expected} edges, found {found}")]
    EdgeCountMismatch { expected: usize, found: usize },
}

#[derive(Debug, Error)]
pub enum BuildError {
    /// Perturbation failed to isolate a unique shortest path at `vertex`;
    /// the builder resamples the seed and retries up to a cap.
    #[error("shortest-path tie at vertex {vertex} (source {src})")]
    TieDetected { src: Vertex, vertex: Vertex },
    #[error("tie persisted after {attempts} perturbation seeds")]
    TieRetriesExhausted { attempts: u32 },
    #[error("registry would exceed the memory cap: {records} records > {cap}")]
    MemCapExceeded { records: u64, cap: u64 },
}

#[derive(Debug, Error)]
pub enum QueryError {
    #[error("vertex {0} out of range")]
    VertexOutOfRange(u64),
    #[error("edge ({0}, {1}) not present in the graph")]
    NoSuchEdge(Vertex, Vertex),
    /// Strict mode only: a landmark walk found no member within budget.
    #[error("no landmark at level {level} within budget {budget}")]
    LandmarkMiss { level: u32, budget: u32 },
    /// Strict mode only. Structurally unreachable after the admission guard
    /// passes (the true fault pair is always a satisfying candidate), but kept
    /// so the strict contract is explicit.
    #[error("no registry entry satisfies the probed key")]
    MissingKey,
}

#[derive(Debug, Error)]
pub enum SnapshotError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("bad magic (not a snapshot file)")]
    BadMagic,
    #[error("unsupported snapshot version {0}")]
    BadVersion(u32),
    #[error("snapshot truncated or corrupt: {0}")]
    Corrupt(&'static str),
}
