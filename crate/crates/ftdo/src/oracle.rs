//! Assembled oracle: perturbation, trees, single-fault index, landmarks, and
//! the maximiser registry, built in dependency order with tie-resampling.

use crate::config::Config;
use crate::error::BuildError;
use crate::graph::{perturb, Graph, PerturbedGraph, Vertex};
use crate::landmarks::{sample_landmarks, LandmarkSets};
use crate::maximiser::{build_registry, Ctx, MaximiserRegistry};
use crate::single_fault::{build_single_fault, SingleFaultIndex};
use crate::spt::{dijkstra_avoiding, LcaIndex, SptCore};
use crate::fault::FaultSet;

#[derive(Debug)]
pub struct Oracle {
    pub pg: PerturbedGraph,
    pub spts: Vec<SptCore>,
    pub lcas: Vec<LcaIndex>,
    pub single: SingleFaultIndex,
    pub landmarks: LandmarkSets,
    pub registry: MaximiserRegistry,
    pub config: Config,
}

impl Oracle {
    /// Perturb → all SPTs → single-fault index (resampling the seed while any
    /// Dijkstra reports a tie) → landmarks → registry.
    pub fn build(graph: Graph, config: Config) -> Result<Oracle, BuildError> {
        let (pg, spts, single) = perturb_until_tie_free(&graph, &config)?;
        let lcas = spts.iter().map(LcaIndex::build).collect();
        let landmarks = sample_landmarks(pg.n(), config.landmark_c, config.seed);
        let registry = {
            let ctx = Ctx {
                pg: &pg,
                spts: &spts,
                single: &single,
            };
            build_registry(&ctx, config.mem_cap_records)?
        };
        Ok(Oracle {
            pg,
            spts,
            lcas,
            single,
            landmarks,
            registry,
            config,
        })
    }

    #[inline]
    pub fn ctx(&self) -> Ctx<'_> {
        Ctx {
            pg: &self.pg,
            spts: &self.spts,
            single: &self.single,
        }
    }

    #[inline]
    pub fn n(&self) -> u32 {
        self.pg.n()
    }

    pub fn fault_set(&self, edges: &[crate::graph::EdgeId]) -> FaultSet {
        FaultSet::new(&self.pg.graph, edges)
    }

    /// Reconstitute an oracle from stored parts (snapshot load): trees, the
    /// single-fault index, and LCA tables are pure functions of the stored
    /// perturbation and are recomputed here.
    pub fn assemble(
        graph: Graph,
        perturbation_seed: u64,
        perturbation: Vec<u64>,
        landmarks: LandmarkSets,
        registry: MaximiserRegistry,
        config: Config,
    ) -> Result<Oracle, BuildError> {
        let n = graph.n() as u64;
        let pg = PerturbedGraph {
            base: n * n * n,
            graph,
            perturbation,
            seed: perturbation_seed,
        };
        let mut spts = Vec::with_capacity(pg.n() as usize);
        for s in 0..pg.n() {
            spts.push(dijkstra_avoiding(&pg, s, &FaultSet::empty())?);
        }
        let single = build_single_fault(&pg, &spts)?;
        let lcas = spts.iter().map(LcaIndex::build).collect();
        Ok(Oracle {
            pg,
            spts,
            lcas,
            single,
            landmarks,
            registry,
            config,
        })
    }
}

fn build_trees_at_seed(
    graph: &Graph,
    seed: u64,
    jobs: usize,
) -> Result<(PerturbedGraph, Vec<SptCore>, SingleFaultIndex), BuildError> {
    let pg = perturb(graph.clone(), seed);
    let n = pg.n() as usize;
    let spts = if jobs > 1 && n > 1 {
        let mut out: Vec<Option<SptCore>> = vec![None; n];
        let chunk = n.div_ceil(jobs);
        std::thread::scope(|scope| {
            let mut handles = Vec::new();
            for (i, slice) in out.chunks_mut(chunk).enumerate() {
                let pg = &pg;
                handles.push(scope.spawn(move || {
                    for (j, slot) in slice.iter_mut().enumerate() {
                        let s = (i * chunk + j) as Vertex;
                        *slot = Some(dijkstra_avoiding(pg, s, &FaultSet::empty())?);
                    }
                    Ok::<(), BuildError>(())
                }));
            }
            for h in handles {
                h.join().expect("worker panicked")?;
            }
            Ok::<(), BuildError>(())
        })?;
        out.into_iter().map(Option::unwrap).collect()
    } else {
        let mut spts = Vec::with_capacity(n);
        for s in 0..n as Vertex {
            spts.push(dijkstra_avoiding(&pg, s, &FaultSet::empty())?);
        }
        spts
    };
    let single = build_single_fault(&pg, &spts)?;
    Ok((pg, spts, single))
}

fn perturb_until_tie_free(
    graph: &Graph,
    config: &Config,
) -> Result<(PerturbedGraph, Vec<SptCore>, SingleFaultIndex), BuildError> {
    let mut last = None;
    for attempt in 0..config.tie_retries.max(1) {
        match build_trees_at_seed(graph, config.seed.wrapping_add(attempt as u64), config.jobs) {
            Ok(built) => return Ok(built),
            Err(e @ BuildError::TieDetected { .. }) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    let _ = last;
    Err(BuildError::TieRetriesExhausted {
        attempts: config.tie_retries.max(1),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{c5, grid};

    #[test]
    fn builds_and_is_deterministic() {
        let a = Oracle::build(c5(), Config::default()).unwrap();
        let b = Oracle::build(c5(), Config::default()).unwrap();
        assert_eq!(a.pg.perturbation, b.pg.perturbation);
        assert_eq!(a.registry.counts(), b.registry.counts());
        assert!(a.registry.counts().total > 0);
    }

    #[test]
    fn parallel_build_matches_serial() {
        let serial = Oracle::build(grid(3, 3), Config::default()).unwrap();
        let parallel = Oracle::build(
            grid(3, 3),
            Config {
                jobs: 3,
                ..Config::default()
            },
        )
        .unwrap();
        assert_eq!(serial.pg.perturbation, parallel.pg.perturbation);
        assert_eq!(serial.spts, parallel.spts);
        assert_eq!(serial.registry.tables(), parallel.registry.tables());
    }
}
