//! Query engine: classify the fault configuration, run the four detour-case
//! flows over the maximiser registry, chase D-close → clean → intermediate
//! vertices, and recurse over the returned candidates.
//!
//! Soundness rests on two guards, both checked at query time:
//! * a maximiser length is admitted only when the true fault pair verifiably
//!   satisfies the probed key's conditions, and
//! * a prefix-advance candidate |s·y| + Query(y, t, …) is emitted only when
//!   the tree path s→y contains no fault edge, which pins |s·y| to the true
//!   faulted distance.
//! Wrong-case flows therefore contribute only safe candidates.

use std::collections::{HashMap, HashSet};

use crate::error::QueryError;
use crate::fault::FaultSet;
use crate::graph::{add_hops, EdgeId, Vertex, INF_H, NO_EDGE};
use crate::landmarks::{landmark_from_source, landmark_toward_source, WalkOutcome};
use crate::maximiser::{self, MaxKey, PairRule, SideCond};
use crate::oracle::Oracle;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DetourCase {
    Primary,
    Secondary,
}

/// Per-side ladder state threaded through the recursion: nothing known yet,
/// D-close to a fault at some landmark level, or an established clean vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SideState {
    Start,
    DClose { level: u8, case: DetourCase },
    Clean(Vertex),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CaseTag {
    NoFaultOnPrimary,
    SingleEffective,
    BothPrimary,
    PrimaryPlusSecondary,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CandidateKind {
    /// Fault-free primary path.
    Direct,
    /// Single-fault short circuit.
    SingleFault,
    /// Admitted maximiser length (plus any chain prefix).
    AdmittedL,
    /// Prefix-advance candidate through the named vertex.
    PrefixExtra(Vertex),
    /// Recursion split at the named hit-set vertex.
    Split(Vertex),
}

#[derive(Debug, Clone, Copy)]
pub struct CandidateEvent {
    pub s: Vertex,
    pub t: Vertex,
    pub value: u32,
    pub kind: CandidateKind,
}

/// Fired when the three-maximiser chain reaches its geometric probe at p.
#[derive(Debug, Clone, Copy)]
pub struct ChainEvent {
    /// Root of the middle probe whose entry produced p.
    pub root: Vertex,
    pub p: Vertex,
    pub dest: Vertex,
    pub e1: EdgeId,
    pub e2: EdgeId,
    /// floor((1+ε)^i) for the chosen exponent i.
    pub geo_bound: u32,
    /// True when the true fault pair satisfied both the middle key at `root`
    /// and the geometric key at `p` — the regime in which the detour-geometry
    /// bounds are claimed.
    pub hypotheses_hold: bool,
}

/// Off-primary maximiser endpoint with an intact prefix (clean-promotion
/// hypothesis); `clean` records whether the subtree side held too.
#[derive(Debug, Clone, Copy)]
pub struct CleanEvent {
    pub root: Vertex,
    pub x: Vertex,
    pub clean: bool,
}

#[derive(Debug, Default)]
pub struct Trace {
    pub candidates: Vec<CandidateEvent>,
    pub chains: Vec<ChainEvent>,
    pub clean_promotions: Vec<CleanEvent>,
}

#[derive(Debug)]
pub struct QueryOutcome {
    pub distance: u32,
    pub certified: bool,
    pub probes: u32,
    pub landmark_misses: u32,
    pub reroute_cap_hits: u32,
    pub trace: Option<Trace>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct MemoKey {
    s: Vertex,
    t: Vertex,
    budget: u8,
    ss: SideState,
    ts: SideState,
}

#[derive(Debug, Clone, Copy)]
enum Role {
    Src,
    Dst,
}

#[derive(Debug, Clone, Copy)]
struct Extra {
    prefix: u32,
    v: Vertex,
    state: SideState,
    role: Role,
}

#[derive(Debug, Default)]
struct HitOut {
    l: u32,
    h: Vec<Vertex>,
    extras: Vec<Extra>,
}

/// One chain site: a probe context rooted at `root` for one side of the key,
/// the other side frozen at (`fixed`, `fixed_cond`).
#[derive(Clone, Copy)]
struct Site {
    role: Role,
    root: Vertex,
    fixed: Vertex,
    /// Hops from this side's original endpoint to `root` along verified
    /// fault-free tree paths.
    acc: u32,
    fixed_cond: SideCond,
    rule: PairRule,
    /// Primary-path fault nearest this side's root.
    e_near: EdgeId,
    /// Secondary-path fault (primary/secondary rule only).
    e_sec: EdgeId,
}

struct Run<'a> {
    o: &'a Oracle,
    /// Endpoints of the hard-case node currently accumulating candidates;
    /// admitted lengths are attributed to it in the trace.
    node: (Vertex, Vertex),
    f: FaultSet,
    fe: [EdgeId; 2],
    memo: HashMap<MemoKey, u32>,
    in_progress: HashSet<MemoKey>,
    probes: u32,
    uncertified: bool,
    landmark_misses: u32,
    reroutes: u32,
    reroute_cap_hits: u32,
    trace: Option<Trace>,
}

const PROBES_PER_FLOW: u32 = 6;

#[inline]
fn floor_log2(x: u32) -> u32 {
    31 - x.max(1).leading_zeros()
}

#[inline]
fn pow2floor(x: u32) -> u32 {
    1 << floor_log2(x)
}

/// Largest floor((1+ε)^i) that is ≤ x (and ≥ 1).
fn geo_floor(eps: f64, x: u32) -> u32 {
    if x <= 1 {
        return 1;
    }
    let mut val = 1.0f64;
    let mut best = 1u32;
    loop {
        val *= 1.0 + eps;
        let f = val as u32;
        if f <= x {
            best = best.max(f);
        } else {
            return best;
        }
        if val > u32::MAX as f64 {
            return best;
        }
    }
}

/// Classification by path membership alone (the easy cases short-circuit).
pub fn classify(o: &Oracle, s: Vertex, t: Vertex, f: &FaultSet) -> CaseTag {
    let tu = &o.spts[s as usize];
    if s == t || !tu.reachable(t) {
        return CaseTag::NoFaultOnPrimary;
    }
    let mut on: Vec<EdgeId> = f
        .edges()
        .filter(|&e| tu.edge_on_root_path(&o.pg.graph, e, t))
        .collect();
    match on.len() {
        0 => CaseTag::NoFaultOnPrimary,
        2 => CaseTag::BothPrimary,
        _ => {
            let e1 = on.pop().unwrap();
            let other = f.edges().find(|&e| e != e1);
            match other {
                Some(e2) if o.single.edge_on_secondary(&o.pg, s, t, e1, e2) => {
                    CaseTag::PrimaryPlusSecondary
                }
                _ => CaseTag::SingleEffective,
            }
        }
    }
}

/// Hardened-mode query; never errors.
pub fn query(o: &Oracle, s: Vertex, t: Vertex, f: &FaultSet) -> QueryOutcome {
    try_query(o, s, t, f, false).expect("hardened query cannot error")
}

pub fn query_traced(o: &Oracle, s: Vertex, t: Vertex, f: &FaultSet) -> QueryOutcome {
    try_query(o, s, t, f, true).expect("hardened query cannot error")
}

/// Full-control entry point; strict mode surfaces LandmarkMiss/MissingKey.
pub fn try_query(
    o: &Oracle,
    s: Vertex,
    t: Vertex,
    f: &FaultSet,
    traced: bool,
) -> Result<QueryOutcome, QueryError> {
    let mut fe = [NO_EDGE; 2];
    for (i, e) in f.edges().enumerate() {
        fe[i] = e;
    }
    let mut run = Run {
        o,
        node: (s, t),
        f: *f,
        fe,
        memo: HashMap::new(),
        in_progress: HashSet::new(),
        probes: 0,
        uncertified: false,
        landmark_misses: 0,
        reroutes: 0,
        reroute_cap_hits: 0,
        trace: traced.then(Trace::default),
    };
    let distance = run.rec(s, t, 2, SideState::Start, SideState::Start)?;
    Ok(QueryOutcome {
        distance,
        certified: !run.uncertified,
        probes: run.probes,
        landmark_misses: run.landmark_misses,
        reroute_cap_hits: run.reroute_cap_hits,
        trace: run.trace,
    })
}

/// Hit-set entry point: upper bound L and candidate vertices H for
/// a two-fault-active pair, from fresh side states.
pub fn hitset(o: &Oracle, s: Vertex, t: Vertex, f: &FaultSet) -> (u32, Vec<Vertex>) {
    let mut fe = [NO_EDGE; 2];
    for (i, e) in f.edges().enumerate() {
        fe[i] = e;
    }
    let mut run = Run {
        o,
        node: (s, t),
        f: *f,
        fe,
        memo: HashMap::new(),
        in_progress: HashSet::new(),
        probes: 0,
        uncertified: false,
        landmark_misses: 0,
        reroutes: 0,
        reroute_cap_hits: 0,
        trace: None,
    };
    let case = classify(o, s, t, f);
    let out = match case {
        CaseTag::BothPrimary | CaseTag::PrimaryPlusSecondary => run
            .hitset(s, t, SideState::Start, SideState::Start, case)
            .unwrap_or_default(),
        _ => HitOut {
            l: INF_H,
            h: Vec::new(),
            extras: Vec::new(),
        },
    };
    (out.l, out.h)
}

impl<'a> Run<'a> {
    fn g(&self) -> &crate::graph::Graph {
        &self.o.pg.graph
    }

    fn note_candidate(&mut self, s: Vertex, t: Vertex, value: u32, kind: CandidateKind) {
        if let Some(trace) = self.trace.as_mut() {
            trace.candidates.push(CandidateEvent { s, t, value, kind });
        }
    }

    fn rec(
        &mut self,
        s: Vertex,
        t: Vertex,
        budget: u8,
        ss: SideState,
        ts: SideState,
    ) -> Result<u32, QueryError> {
        if s == t {
            return Ok(0);
        }
        let tu = &self.o.spts[s as usize];
        if !tu.reachable(t) {
            return Ok(INF_H);
        }
        // A fault-free primary path answers immediately.
        let mut on = [NO_EDGE; 2];
        let mut on_cnt = 0usize;
        for e in self.f.edges() {
            if tu.edge_on_root_path(self.g(), e, t) {
                on[on_cnt] = e;
                on_cnt += 1;
            }
        }
        if on_cnt == 0 {
            let d = tu.dist_h[t as usize];
            self.note_candidate(s, t, d, CandidateKind::Direct);
            return Ok(d);
        }
        if budget == 0 {
            return Ok(INF_H);
        }

        // Single-fault short circuits.
        if on_cnt == 1 {
            let e1 = on[0];
            let other = self.f.edges().find(|&e| e != e1);
            let effective_two = match other {
                Some(e2) => self.o.single.edge_on_secondary(&self.o.pg, s, t, e1, e2),
                None => false,
            };
            if !effective_two {
                let d = self.o.single.dist_1f(&self.o.spts, s, t, e1);
                self.note_candidate(s, t, d, CandidateKind::SingleFault);
                return Ok(d);
            }
        }

        let key = MemoKey {
            s,
            t,
            budget,
            ss,
            ts,
        };
        if let Some(&d) = self.memo.get(&key) {
            return Ok(d);
        }
        // Cycle breaker for same-budget prefix-advance chains. Any derivation
        // revisiting its own state carries a positive prefix, so it cannot be
        // uniquely optimal; ∞ discards it safely.
        if !self.in_progress.insert(key) {
            return Ok(INF_H);
        }
        let result = self.hard_case(s, t, budget, ss, ts, on, on_cnt);
        self.in_progress.remove(&key);
        let d = result?;
        self.memo.insert(key, d);
        Ok(d)
    }

    fn hard_case(
        &mut self,
        s: Vertex,
        t: Vertex,
        budget: u8,
        ss: SideState,
        ts: SideState,
        on: [EdgeId; 2],
        on_cnt: usize,
    ) -> Result<u32, QueryError> {
        let case = if on_cnt == 2 {
            CaseTag::BothPrimary
        } else {
            CaseTag::PrimaryPlusSecondary
        };
        self.node = (s, t);
        let _ = on;
        let out = self.hitset(s, t, ss, ts, case)?;
        let mut ans = out.l;

        for &x in &out.h {
            if x == s || x == t {
                continue;
            }
            let left = self.rec(s, x, budget - 1, SideState::Start, SideState::Start)?;
            if left == INF_H {
                continue;
            }
            let right = self.rec(x, t, budget - 1, SideState::Start, SideState::Start)?;
            let cand = add_hops(left, right);
            self.note_candidate(s, t, cand, CandidateKind::Split(x));
            ans = ans.min(cand);
        }

        for ex in out.extras {
            // A flip of the working case burns one reroute; beyond the cap
            // the chain is cut (counted, uncertified).
            let (u, v, sst, tst) = match ex.role {
                Role::Src => (ex.v, t, ex.state, ts),
                Role::Dst => (s, ex.v, ss, ex.state),
            };
            if self.flips_case(u, v, ex.state) {
                if self.reroutes >= self.o.config.max_reroutes {
                    self.reroute_cap_hits += 1;
                    self.uncertified = true;
                    continue;
                }
                self.reroutes += 1;
            }
            let rest = self.rec(u, v, budget, sst, tst)?;
            let cand = add_hops(ex.prefix, rest);
            self.note_candidate(s, t, cand, CandidateKind::PrefixExtra(ex.v));
            ans = ans.min(cand);
        }
        Ok(ans)
    }

    /// Does the adopted state disagree with the configuration at (u, v)?
    fn flips_case(&self, u: Vertex, v: Vertex, state: SideState) -> bool {
        let claimed = match state {
            SideState::DClose { case, .. } => case,
            _ => return false,
        };
        if u == v {
            return false;
        }
        let tu = &self.o.spts[u as usize];
        if !tu.reachable(v) {
            return false;
        }
        let on_primary = self
            .f
            .edges()
            .filter(|&e| tu.edge_on_root_path(self.g(), e, v))
            .count();
        match claimed {
            DetourCase::Primary => on_primary == 0,
            DetourCase::Secondary => on_primary == 2,
        }
    }

    fn hitset(
        &mut self,
        s: Vertex,
        t: Vertex,
        ss: SideState,
        ts: SideState,
        case: CaseTag,
    ) -> Result<HitOut, QueryError> {
        let mut out = HitOut {
            l: INF_H,
            h: Vec::new(),
            extras: Vec::new(),
        };
        let tu = &self.o.spts[s as usize];
        let mut on: Vec<EdgeId> = self
            .f
            .edges()
            .filter(|&e| tu.edge_on_root_path(self.g(), e, t))
            .collect();
        match case {
            CaseTag::BothPrimary => {
                debug_assert_eq!(on.len(), 2);
                // Nearer-s fault first.
                let z0 = tu.tree_edge_lower(self.g(), on[0]).unwrap();
                let z1 = tu.tree_edge_lower(self.g(), on[1]).unwrap();
                if !tu.is_ancestor(z0, z1) {
                    on.swap(0, 1);
                }
                self.flow(
                    &mut out,
                    s,
                    t,
                    PairRule::BothPrimary,
                    on[0],
                    on[1],
                    DetourCase::Primary,
                    DetourCase::Primary,
                    ss,
                    ts,
                )?;
            }
            CaseTag::PrimaryPlusSecondary => {
                let e1 = on[0];
                let e2 = self.f.edges().find(|&e| e != e1).unwrap();
                for sc in [DetourCase::Primary, DetourCase::Secondary] {
                    for tc in [DetourCase::Primary, DetourCase::Secondary] {
                        self.flow(
                            &mut out,
                            s,
                            t,
                            PairRule::PrimarySecondary,
                            e1,
                            e2,
                            sc,
                            tc,
                            ss,
                            ts,
                        )?;
                    }
                }
            }
            _ => {}
        }
        out.h.sort_unstable();
        out.h.dedup();
        debug_assert!(out.h.len() <= 96);
        Ok(out)
    }

    /// Hop distance from `u` to the nearer endpoint of `e` in T_u.
    fn near_hops(&self, u: Vertex, e: EdgeId) -> Option<u32> {
        if e == NO_EDGE {
            return None;
        }
        let tu = &self.o.spts[u as usize];
        let (a, b) = self.g().endpoints(e);
        let da = if tu.reachable(a) { tu.dist_h[a as usize] } else { INF_H };
        let db = if tu.reachable(b) { tu.dist_h[b as usize] } else { INF_H };
        let d = da.min(db);
        (d != INF_H).then_some(d)
    }

    /// Hop distance from `u` to the nearer endpoint of `e_sec` on the
    /// secondary tree of (u, e_near); None if that tree is unavailable.
    fn near_hops_secondary(&self, u: Vertex, e_near: EdgeId, e_sec: EdgeId) -> Option<u32> {
        if e_sec == NO_EDGE {
            return None;
        }
        let sec = self.o.single.get(u, e_near)?;
        let (a, b) = self.g().endpoints(e_sec);
        let da = if sec.reachable(a) { sec.dist_h[a as usize] } else { INF_H };
        let db = if sec.reachable(b) { sec.dist_h[b as usize] } else { INF_H };
        let d = da.min(db);
        (d != INF_H).then_some(d)
    }

    /// Side condition for a chain root in a given ladder state.
    fn chain_cond(
        &self,
        root: Vertex,
        state: SideState,
        dc: DetourCase,
        rule: PairRule,
        e_near: EdgeId,
        e_sec: EdgeId,
    ) -> Option<SideCond> {
        let d1 = self.near_hops(root, e_near)?;
        match state {
            SideState::Start => match dc {
                DetourCase::Primary => Some(SideCond::PrimaryIntact { d: pow2floor(d1) }),
                DetourCase::Secondary => {
                    debug_assert_eq!(rule, PairRule::PrimarySecondary);
                    let d2 = self.near_hops_secondary(root, e_near, e_sec)?;
                    Some(SideCond::BothIntact {
                        d: pow2floor(d1.min(d2)),
                    })
                }
            },
            SideState::DClose { case, .. } => match case {
                DetourCase::Primary => Some(SideCond::PrimaryIntact { d: d1.max(1) }),
                DetourCase::Secondary => {
                    match self.near_hops_secondary(root, e_near, e_sec) {
                        Some(d2) => Some(SideCond::Geometric {
                            gb: geo_floor(self.o.config.epsilon, d1.max(1)),
                            d: d2.max(1),
                        }),
                        // Secondary context gone at this root: weakest sound
                        // prefix condition (admission re-checks everything).
                        None => Some(SideCond::PrimaryIntact { d: 1 }),
                    }
                }
            },
            SideState::Clean(p) => Some(SideCond::Clean { v: p }),
        }
    }

    #[allow(clippy::too_many_arguments)]
    fn flow(
        &mut self,
        out: &mut HitOut,
        s: Vertex,
        t: Vertex,
        rule: PairRule,
        e1: EdgeId,
        e2: EdgeId,
        sc: DetourCase,
        tc: DetourCase,
        ss: SideState,
        ts: SideState,
    ) -> Result<(), QueryError> {
        // Per-side fault roles: under the primary/secondary rule both sides
        // share (e1 primary, e2 secondary); under both-on-primary each side's
        // near fault is its own end of the pair.
        let (src_near, src_sec, dst_near, dst_sec) = match rule {
            PairRule::PrimarySecondary => (e1, e2, e1, e2),
            PairRule::BothPrimary => (e1, NO_EDGE, e2, NO_EDGE),
        };
        let src_cond = match self.chain_cond(s, ss, sc, rule, src_near, src_sec) {
            Some(c) => c,
            None => return Ok(()),
        };
        let dst_cond = match self.chain_cond(t, ts, tc, rule, dst_near, dst_sec) {
            Some(c) => c,
            None => return Ok(()),
        };

        let mut probes_left = PROBES_PER_FLOW;
        let src_site = Site {
            role: Role::Src,
            root: s,
            fixed: t,
            acc: 0,
            fixed_cond: dst_cond,
            rule,
            e_near: src_near,
            e_sec: src_sec,
        };
        let dst_site = Site {
            role: Role::Dst,
            root: t,
            fixed: s,
            acc: 0,
            fixed_cond: src_cond,
            rule,
            e_near: dst_near,
            e_sec: dst_sec,
        };
        let base_key = MaxKey {
            s,
            t,
            rule,
            src: src_cond,
            dst: dst_cond,
        };
        let entry = match self.probe(&mut probes_left, &base_key, 0, out) {
            Some(e) => e,
            None => return Ok(()),
        };
        for x in self.pair_vertices(entry.pair) {
            self.endpoint_transitions(&mut probes_left, out, &src_site, ss, sc, x)?;
            self.endpoint_transitions(&mut probes_left, out, &dst_site, ts, tc, x)?;
        }
        Ok(())
    }

    fn pair_vertices(&self, pair: (EdgeId, EdgeId)) -> [Vertex; 4] {
        let (a, b) = self.g().endpoints(pair.0);
        let (c, d) = self.g().endpoints(pair.1);
        [a, b, c, d]
    }

    fn make_key(&self, site: &Site, chain_cond: SideCond) -> MaxKey {
        match site.role {
            Role::Src => MaxKey {
                s: site.root,
                t: site.fixed,
                rule: site.rule,
                src: chain_cond,
                dst: site.fixed_cond,
            },
            Role::Dst => MaxKey {
                s: site.fixed,
                t: site.root,
                rule: site.rule,
                src: site.fixed_cond,
                dst: chain_cond,
            },
        }
    }

    /// One registry probe: lookup, hit-set accumulation, admission of the
    /// length when the true faults satisfy the key. Returns the entry.
    fn probe(
        &mut self,
        probes_left: &mut u32,
        key: &MaxKey,
        acc: u32,
        out: &mut HitOut,
    ) -> Option<maximiser::MaxEntry> {
        if *probes_left == 0 {
            return None;
        }
        *probes_left -= 1;
        self.probes += 1;
        let ctx = self.o.ctx();
        let entry = maximiser::lookup(&self.o.registry, &ctx, key)?;
        for v in self.pair_vertices(entry.pair) {
            out.h.push(v);
        }
        if maximiser::pair_satisfies(&ctx, key, self.fe[0], self.fe[1]) {
            let cand = add_hops(acc, entry.len);
            let (ns, nt) = self.node;
            self.note_candidate(ns, nt, cand, CandidateKind::AdmittedL);
            out.l = out.l.min(cand);
        }
        Some(entry)
    }

    /// Resolve a landmark walk under the configured mode.
    fn resolve_walk(
        &mut self,
        walk: WalkOutcome,
        level: u32,
        budget: u32,
    ) -> Result<Option<Vertex>, QueryError> {
        match walk.found {
            Some(y) => Ok(Some(y)),
            None => {
                self.landmark_misses += 1;
                if self.o.config.strict {
                    Err(QueryError::LandmarkMiss { level, budget })
                } else {
                    self.uncertified = true;
                    Ok(Some(walk.fallback))
                }
            }
        }
    }

    fn push_extra(&mut self, out: &mut HitOut, site: &Site, prefix: u32, v: Vertex, state: SideState) {
        // Progress guard: re-entering the identical side state is a no-op.
        if v == site.root && site.acc == 0 {
            if let SideState::DClose { .. } = state {
                // state advance at the same vertex is progress; allow.
            } else {
                return;
            }
        }
        let ex = Extra {
            prefix,
            v,
            state,
            role: site.role,
        };
        if !out
            .extras
            .iter()
            .any(|e| e.prefix == ex.prefix && e.v == v && e.state == state && matches!((e.role, site.role), (Role::Src, Role::Src) | (Role::Dst, Role::Dst)))
        {
            out.extras.push(ex);
        }
    }

    /// All chain transitions available from one endpoint `x` of a probed
    /// entry, on the side described by `site`.
    #[allow(clippy::too_many_arguments)]
    fn endpoint_transitions(
        &mut self,
        probes_left: &mut u32,
        out: &mut HitOut,
        site: &Site,
        state: SideState,
        dc: DetourCase,
        x: Vertex,
    ) -> Result<(), QueryError> {
        let tu = &self.o.spts[site.root as usize];
        if !tu.reachable(x) {
            return Ok(());
        }
        let prefix_ok = tu.prefix_intact(x, &self.f);
        let on_primary = tu.is_ancestor(x, site.fixed);

        // Clean promotion: off-primary endpoint with an intact prefix.
        if prefix_ok && !on_primary && x != site.root {
            let clean = tu.is_clean(x, &self.f);
            if let Some(trace) = self.trace.as_mut() {
                trace.clean_promotions.push(CleanEvent {
                    root: site.root,
                    x,
                    clean,
                });
            }
            if clean {
                self.clean_probe(probes_left, out, site, x);
            }
            return Ok(());
        }

        // Walk transitions only make sense before D-closeness is established.
        if !matches!(state, SideState::Start) {
            return Ok(());
        }

        match dc {
            DetourCase::Primary => {
                if prefix_ok && on_primary {
                    let d1 = match self.near_hops(site.root, site.e_near) {
                        Some(d) => d,
                        None => return Ok(()),
                    };
                    let level = floor_log2(d1.max(1));
                    let budget = 1u32 << level;
                    let walk = landmark_toward_source(&self.o.landmarks, tu, x, level, budget);
                    if let Some(y) = self.resolve_walk(walk, level, budget)? {
                        if !tu.fault_on_root_path(self.g(), &self.f, y) {
                            self.push_extra(
                                out,
                                site,
                                add_hops(site.acc, tu.dist_h[y as usize]),
                                y,
                                SideState::DClose {
                                    level: level as u8,
                                    case: DetourCase::Primary,
                                },
                            );
                        }
                    }
                }
            }
            DetourCase::Secondary => {
                let d1 = match self.near_hops(site.root, site.e_near) {
                    Some(d) => d,
                    None => return Ok(()),
                };
                let d2 = self.near_hops_secondary(site.root, site.e_near, site.e_sec);
                match d2 {
                    Some(d2) if d2 <= d1 => {
                        // Detour start close to the secondary fault: walk on
                        // the secondary tree toward the root.
                        let sec = self.o.single.get(site.root, site.e_near).unwrap();
                        if sec.reachable(x)
                            && sec.is_ancestor(x, site.fixed)
                            && sec.prefix_intact(x, &self.f)
                        {
                            let level = floor_log2(d2.max(1));
                            let budget = 1u32 << level;
                            let walk =
                                landmark_toward_source(&self.o.landmarks, sec, x, level, budget);
                            if let Some(y) = self.resolve_walk(walk, level, budget)? {
                                if !sec.fault_on_root_path(self.g(), &self.f, y) {
                                    self.push_extra(
                                        out,
                                        site,
                                        add_hops(site.acc, sec.dist_h[y as usize]),
                                        y,
                                        SideState::DClose {
                                            level: level as u8,
                                            case: DetourCase::Secondary,
                                        },
                                    );
                                }
                            }
                        }
                    }
                    _ => {
                        // |root·e1| < |root·e2 ⋄ e1| (or no secondary tree):
                        // three-maximiser chain through a close-to-e1 vertex.
                        if prefix_ok {
                            let level = floor_log2(d1.max(1));
                            let budget = 1u32 << level;
                            let walk = landmark_from_source(
                                &self.o.landmarks,
                                tu,
                                x,
                                level,
                                budget,
                            );
                            if let Some(y) = self.resolve_walk(walk, level, budget)? {
                                if !tu.fault_on_root_path(self.g(), &self.f, y) {
                                    self.chain_middle(probes_left, out, site, y)?;
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Second maximiser of the chain, probed at the close vertex y with the
    /// exact |y·e1| budget on both paths.
    fn chain_middle(
        &mut self,
        probes_left: &mut u32,
        out: &mut HitOut,
        site: &Site,
        y: Vertex,
    ) -> Result<(), QueryError> {
        let d1y = match self.near_hops(y, site.e_near) {
            Some(d) => d,
            None => return Ok(()),
        };
        let acc_y = add_hops(site.acc, self.o.spts[site.root as usize].dist_h[y as usize]);
        let site_y = Site {
            root: y,
            acc: acc_y,
            ..*site
        };
        let key = self.make_key(&site_y, SideCond::BothIntact { d: d1y.max(1) });
        let entry = match self.probe(probes_left, &key, acc_y, out) {
            Some(e) => e,
            None => return Ok(()),
        };
        let sat_mid = self.trace.is_some()
            && maximiser::pair_satisfies(&self.o.ctx(), &key, self.fe[0], self.fe[1]);
        let ty = &self.o.spts[y as usize];
        for p in self.pair_vertices(entry.pair) {
            if !ty.reachable(p) || ty.fault_on_root_path(self.g(), &self.f, p) {
                continue;
            }
            let acc_p = add_hops(acc_y, ty.dist_h[p as usize]);
            // The chain's middle output is never promoted to clean; it only
            // restarts the ladder as a plain prefix-advance.
            if p != y || site.acc != acc_p {
                self.push_extra(out, &site_y, acc_p, p, SideState::Start);
            }
            self.chain_geometric(probes_left, out, &site_y, p, acc_p, sat_mid)?;
        }
        Ok(())
    }

    /// Third maximiser: geometric prefix at p plus the secondary budget, then
    /// a walk on p's secondary tree toward p.
    fn chain_geometric(
        &mut self,
        probes_left: &mut u32,
        out: &mut HitOut,
        site: &Site,
        p: Vertex,
        acc_p: u32,
        sat_mid: bool,
    ) -> Result<(), QueryError> {
        let d1p = match self.near_hops(p, site.e_near) {
            Some(d) => d,
            None => return Ok(()),
        };
        let sec_p = match self.o.single.get(p, site.e_near) {
            Some(sec) => sec,
            None => return Ok(()),
        };
        let d2p = match self.near_hops_secondary(p, site.e_near, site.e_sec) {
            Some(d) => d,
            None => return Ok(()),
        };
        let gb = geo_floor(self.o.config.epsilon, d1p.max(1));
        let site_p = Site {
            root: p,
            acc: acc_p,
            ..*site
        };
        let key = self.make_key(
            &site_p,
            SideCond::Geometric {
                gb,
                d: pow2floor(d2p),
            },
        );
        if self.trace.is_some() {
            let sat = sat_mid
                && maximiser::pair_satisfies(&self.o.ctx(), &key, self.fe[0], self.fe[1]);
            self.trace.as_mut().unwrap().chains.push(ChainEvent {
                root: site.root,
                p,
                dest: site.fixed,
                e1: site.e_near,
                e2: site.e_sec,
                geo_bound: gb,
                hypotheses_hold: sat,
            });
        }
        let entry = match self.probe(probes_left, &key, acc_p, out) {
            Some(e) => e,
            None => return Ok(()),
        };
        let level = floor_log2(d2p.max(1));
        let budget = 1u32 << level;
        for x2 in self.pair_vertices(entry.pair) {
            if !sec_p.reachable(x2)
                || !sec_p.is_ancestor(x2, site.fixed)
                || !sec_p.prefix_intact(x2, &self.f)
            {
                continue;
            }
            let walk = landmark_toward_source(&self.o.landmarks, sec_p, x2, level, budget);
            if let Some(y2) = self.resolve_walk(walk, level, budget)? {
                if !sec_p.fault_on_root_path(self.g(), &self.f, y2) {
                    self.push_extra(
                        out,
                        &site_p,
                        add_hops(acc_p, sec_p.dist_h[y2 as usize]),
                        y2,
                        SideState::DClose {
                            level: level as u8,
                            case: DetourCase::Secondary,
                        },
                    );
                }
            }
        }
        Ok(())
    }

    /// Clean-vertex probe on one side; its endpoints may in turn promote a
    /// clean vertex on the opposite side (both-sides-clean key).
    fn clean_probe(&mut self, probes_left: &mut u32, out: &mut HitOut, site: &Site, x: Vertex) {
        let key = self.make_key(site, SideCond::Clean { v: x });
        let entry = match self.probe(probes_left, &key, site.acc, out) {
            Some(e) => e,
            None => return,
        };
        // Opposite side: the fixed endpoint's own tree.
        let tv = &self.o.spts[site.fixed as usize];
        for q in self.pair_vertices(entry.pair) {
            if q == site.fixed
                || !tv.reachable(q)
                || tv.is_ancestor(q, site.root)
                || !tv.is_clean(q, &self.f)
            {
                continue;
            }
            let key2 = match site.role {
                Role::Src => MaxKey {
                    s: site.root,
                    t: site.fixed,
                    rule: site.rule,
                    src: SideCond::Clean { v: x },
                    dst: SideCond::Clean { v: q },
                },
                Role::Dst => MaxKey {
                    s: site.fixed,
                    t: site.root,
                    rule: site.rule,
                    src: SideCond::Clean { v: q },
                    dst: SideCond::Clean { v: x },
                },
            };
            self.probe(probes_left, &key2, site.acc, out);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Config;
    use crate::testutil::{c5, k4, p4};

    fn oracle(g: crate::graph::Graph) -> Oracle {
        Oracle::build(g, Config::default()).unwrap()
    }

    #[test]
    fn empty_fault_set_is_direct() {
        let o = oracle(c5());
        let out = query(&o, 0, 2, &FaultSet::empty());
        assert_eq!(out.distance, 2);
        assert_eq!(out.probes, 0);
        assert!(out.certified);
    }

    #[test]
    fn c5_double_cut_disconnects() {
        let o = oracle(c5());
        let f = o.fault_set(&[0, 3]);
        let out = query(&o, 0, 2, &f);
        assert_eq!(out.distance, INF_H);
    }

    #[test]
    fn k4_two_faults_at_source() {
        let o = oracle(k4());
        let e01 = o.pg.graph.edge_id(0, 1).unwrap();
        let e02 = o.pg.graph.edge_id(0, 2).unwrap();
        let f = o.fault_set(&[e01, e02]);
        let out = query(&o, 0, 1, &f);
        assert_eq!(out.distance, 2); // via 3
    }

    #[test]
    fn p4_bridge() {
        let o = oracle(p4());
        let f = o.fault_set(&[1]);
        assert_eq!(query(&o, 0, 3, &f).distance, INF_H);
    }

    #[test]
    fn classification_examples() {
        let o = oracle(k4());
        let e23 = o.pg.graph.edge_id(2, 3).unwrap();
        assert_eq!(
            classify(&o, 0, 1, &o.fault_set(&[e23])),
            CaseTag::NoFaultOnPrimary
        );
        let o = oracle(p4());
        assert_eq!(classify(&o, 0, 3, &o.fault_set(&[0, 2])), CaseTag::BothPrimary);
        assert_eq!(
            classify(&o, 0, 3, &o.fault_set(&[1])),
            CaseTag::SingleEffective
        );
    }

    #[test]
    fn symmetry_on_fixtures() {
        for g in [p4(), c5(), k4()] {
            let o = oracle(g);
            let m = o.pg.graph.m();
            for e1 in 0..m {
                for e2 in e1..m {
                    let f = o.fault_set(&[e1, e2]);
                    for s in 0..o.n() {
                        for t in 0..o.n() {
                            assert_eq!(
                                query(&o, s, t, &f).distance,
                                query(&o, t, s, &f).distance,
                                "s={s} t={t} F=({e1},{e2})"
                            );
                        }
                    }
                }
            }
        }
    }
}
