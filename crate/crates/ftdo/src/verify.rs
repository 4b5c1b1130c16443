//! Independent verification: plain BFS ground truth and exhaustive sweeps
//! comparing the oracle's answers (and optional per-candidate diagnostics)
//! against it. Nothing here reuses the oracle's data structures.

use std::collections::VecDeque;

use serde::Serialize;

use crate::fault::FaultSet;
use crate::graph::{Graph, Vertex, INF_H};
use crate::oracle::Oracle;
use crate::query::{self, CaseTag};

/// Hop distances from `s` in `g` minus the fault edges, by textbook BFS.
pub fn brute_dist_vector(g: &Graph, s: Vertex, f: &FaultSet) -> Vec<u32> {
    let mut dist = vec![INF_H; g.n() as usize];
    dist[s as usize] = 0;
    let mut queue = VecDeque::new();
    queue.push_back(s);
    while let Some(u) = queue.pop_front() {
        let du = dist[u as usize];
        for &e in g.incident(u) {
            if f.contains(e) {
                continue;
            }
            let v = g.other_endpoint(e, u);
            if dist[v as usize] == INF_H {
                dist[v as usize] = du + 1;
                queue.push_back(v);
            }
        }
    }
    dist
}

pub fn brute_dist(g: &Graph, s: Vertex, t: Vertex, f: &FaultSet) -> u32 {
    brute_dist_vector(g, s, f)[t as usize]
}

/// One shortest path s→t in g − F as a vertex list, if any.
pub fn brute_path(g: &Graph, s: Vertex, t: Vertex, f: &FaultSet) -> Option<Vec<Vertex>> {
    let mut dist = vec![INF_H; g.n() as usize];
    let mut pred = vec![u32::MAX; g.n() as usize];
    dist[s as usize] = 0;
    let mut queue = VecDeque::new();
    queue.push_back(s);
    while let Some(u) = queue.pop_front() {
        if u == t {
            break;
        }
        for &e in g.incident(u) {
            if f.contains(e) {
                continue;
            }
            let v = g.other_endpoint(e, u);
            if dist[v as usize] == INF_H {
                dist[v as usize] = dist[u as usize] + 1;
                pred[v as usize] = u;
                queue.push_back(v);
            }
        }
    }
    if dist[t as usize] == INF_H {
        return None;
    }
    let mut path = vec![t];
    let mut cur = t;
    while cur != s {
        cur = pred[cur as usize];
        path.push(cur);
    }
    path.reverse();
    Some(path)
}

#[derive(Debug, Clone, Serialize)]
pub struct Mismatch {
    pub s: Vertex,
    pub t: Vertex,
    pub faults: Vec<(Vertex, Vertex)>,
    pub got: u32,
    pub want: u32,
    pub certified: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub n: u32,
    pub m: u32,
    pub fault_sets_checked: u64,
    pub queries: u64,
    pub matches: u64,
    pub mismatches: Vec<Mismatch>,
    pub uncertified: u64,
    pub landmark_misses: u64,
    pub reroute_cap_hits: u64,
    pub probe_max: u32,
    pub probe_mean: f64,
    /// Queries answered on the hard (two-effective-fault) path.
    pub hard_case_queries: u64,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Which fault-set sizes to sweep.
#[derive(Debug, Clone, Copy)]
pub struct SweepLimits {
    pub include_empty: bool,
    pub include_single: bool,
    pub include_double: bool,
}

impl Default for SweepLimits {
    fn default() -> Self {
        SweepLimits {
            include_empty: true,
            include_single: true,
            include_double: true,
        }
    }
}

/// Compare every (s, t, F) with |F| within `limits` against brute BFS.
/// Per (s, F) a single BFS vector serves all targets.
pub fn verify_exhaustive(o: &Oracle, limits: SweepLimits) -> VerificationReport {
    let g = &o.pg.graph;
    let n = g.n();
    let m = g.m();
    let mut fault_sets: Vec<FaultSet> = Vec::new();
    if limits.include_empty {
        fault_sets.push(FaultSet::empty());
    }
    if limits.include_single {
        for e in 0..m {
            fault_sets.push(FaultSet::new(g, &[e]));
        }
    }
    if limits.include_double {
        for e1 in 0..m {
            for e2 in e1 + 1..m {
                fault_sets.push(FaultSet::new(g, &[e1, e2]));
            }
        }
    }

    let mut report = VerificationReport {
        n,
        m,
        fault_sets_checked: fault_sets.len() as u64,
        queries: 0,
        matches: 0,
        mismatches: Vec::new(),
        uncertified: 0,
        landmark_misses: 0,
        reroute_cap_hits: 0,
        probe_max: 0,
        probe_mean: 0.0,
        hard_case_queries: 0,
    };
    let mut probe_total: u64 = 0;
    for f in &fault_sets {
        for s in 0..n {
            let truth = brute_dist_vector(g, s, f);
            for t in 0..n {
                if t == s {
                    continue;
                }
                let out = query::query(o, s, t, f);
                report.queries += 1;
                probe_total += out.probes as u64;
                report.probe_max = report.probe_max.max(out.probes);
                if !out.certified {
                    report.uncertified += 1;
                }
                report.landmark_misses += out.landmark_misses as u64;
                report.reroute_cap_hits += out.reroute_cap_hits as u64;
                if matches!(
                    query::classify(o, s, t, f),
                    CaseTag::BothPrimary | CaseTag::PrimaryPlusSecondary
                ) {
                    report.hard_case_queries += 1;
                }
                if out.distance == truth[t as usize] {
                    report.matches += 1;
                } else if report.mismatches.len() < 100 {
                    report.mismatches.push(Mismatch {
                        s,
                        t,
                        faults: f.edges().map(|e| g.endpoints(e)).collect(),
                        got: out.distance,
                        want: truth[t as usize],
                        certified: out.certified,
                    });
                }
            }
        }
    }
    if report.queries > 0 {
        report.probe_mean = probe_total as f64 / report.queries as f64;
    }
    report
}

/// Fold every sound candidate surfaced during a traced query and check that
/// none undercuts the brute truth (one-sided soundness audit).
pub fn audit_candidates(o: &Oracle, s: Vertex, t: Vertex, f: &FaultSet) -> Result<(), Mismatch> {
    let truth = brute_dist(&o.pg.graph, s, t, f);
    let out = query::query_traced(o, s, t, f);
    let trace = out.trace.as_ref().unwrap();
    for ev in &trace.candidates {
        if ev.value < truth && ev.s == s && ev.t == t {
            return Err(Mismatch {
                s,
                t,
                faults: f.edges().map(|e| o.pg.graph.endpoints(e)).collect(),
                got: ev.value,
                want: truth,
                certified: out.certified,
            });
        }
    }
    Ok(())
}
