//! Thin command-line front end over the library: generate graphs, build and
//! snapshot oracles, query, verify against brute force, benchmark, and dump
//! index statistics.
//!
//! Exit codes: 0 ok, 1 verification mismatch, 2 usage or runtime error.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use ftdo::config::Config;
use ftdo::fault::FaultSet;
use ftdo::gen;
use ftdo::graph::{load_graph, write_edge_list, Graph, INF_H};
use ftdo::oracle::Oracle;
use ftdo::query;
use ftdo::snapshot;
use ftdo::verify::{verify_exhaustive, SweepLimits};

#[derive(Parser)]
#[command(name = "ftdo", about = "exact distance oracle under up to two edge faults")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args, Clone)]
struct BuildOpts {
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Landmark sampling constant.
    #[arg(long, default_value_t = 4.0)]
    landmark_c: f64,
    #[arg(long, default_value_t = 0.25)]
    epsilon: f64,
    /// Error out on landmark misses instead of degrading to uncertified.
    #[arg(long)]
    strict: bool,
    /// Registry pair-record cap.
    #[arg(long, default_value_t = 100_000_000)]
    mem_cap: u64,
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

impl BuildOpts {
    fn config(&self) -> Config {
        Config {
            seed: self.seed,
            landmark_c: self.landmark_c,
            epsilon: self.epsilon,
            strict: self.strict,
            mem_cap_records: self.mem_cap,
            jobs: self.jobs,
            ..Config::default()
        }
    }
}

#[derive(Subcommand)]
enum Cmd {
    /// Emit a deterministic graph as an edge list.
    Generate {
        /// gnp | grid | cycle | complete | path
        kind: String,
        #[arg(long)]
        n: u32,
        /// Edge probability (gnp) or grid width.
        #[arg(long, default_value_t = 0.0)]
        p: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// For gnp: keep all components instead of the largest.
        #[arg(long)]
        keep_all: bool,
        #[arg(long)]
        out: Option<String>,
    },
    /// Build every index over an edge list and write a snapshot.
    Build {
        graph: String,
        #[command(flatten)]
        opts: BuildOpts,
        #[arg(long)]
        out: Option<String>,
    },
    /// Answer one query from a snapshot.
    Query {
        snapshot: String,
        s: u32,
        t: u32,
        /// Fault edges as "u,v" (repeatable, at most twice).
        #[arg(long = "fault")]
        faults: Vec<String>,
        #[arg(long)]
        trace: bool,
    },
    /// Exhaustive comparison against brute-force BFS.
    Verify {
        snapshot: String,
        /// Largest fault-set size to sweep (0..=2).
        #[arg(long, default_value_t = 2)]
        max_faults: u8,
        #[arg(long)]
        out: Option<String>,
    },
    /// Timed random-query benchmark with a probe histogram.
    Bench {
        snapshot: String,
        #[arg(long, default_value_t = 100_000)]
        queries: u64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<String>,
    },
    /// Index statistics: entry counts per variant, landmark cardinalities.
    Stats { snapshot: String },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn read_graph(path: &str) -> Result<Graph, Box<dyn std::error::Error>> {
    let file = File::open(path).map_err(|e| format!("{path}: {e}"))?;
    Ok(load_graph(&mut BufReader::new(file))?)
}

fn read_snapshot(path: &str) -> Result<Oracle, Box<dyn std::error::Error>> {
    let file = File::open(path).map_err(|e| format!("{path}: {e}"))?;
    Ok(snapshot::load(&mut BufReader::new(file))?)
}

fn out_writer(path: &Option<String>) -> Result<Box<dyn Write>, Box<dyn std::error::Error>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn parse_fault(g: &Graph, spec: &str) -> Result<u32, String> {
    let (a, b) = spec
        .split_once(',')
        .ok_or_else(|| format!("fault '{spec}' is not 'u,v'"))?;
    let u: u32 = a.trim().parse().map_err(|_| format!("bad vertex '{a}'"))?;
    let v: u32 = b.trim().parse().map_err(|_| format!("bad vertex '{b}'"))?;
    g.edge_id(u, v)
        .ok_or_else(|| format!("no edge ({u},{v}) in graph"))
}

fn run(cli: Cli) -> Result<ExitCode, Box<dyn std::error::Error>> {
    match cli.cmd {
        Cmd::Generate {
            kind,
            n,
            p,
            seed,
            keep_all,
            out,
        } => {
            let g = match kind.as_str() {
                "gnp" => gen::gnp(n, p, seed, keep_all),
                "grid" => {
                    let w = p as u32;
                    if w == 0 {
                        return Err("grid needs --p <width>".into());
                    }
                    gen::grid(w, n.div_ceil(w))
                }
                "cycle" => gen::cycle(n),
                "complete" => gen::complete(n),
                "path" => gen::path(n),
                other => return Err(format!("unknown kind '{other}'").into()),
            };
            let mut w = out_writer(&out)?;
            w.write_all(write_edge_list(&g).as_bytes())?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Build { graph, opts, out } => {
            let g = read_graph(&graph)?;
            let config = opts.config();
            config.validate().map_err(|e| format!("config: {e}"))?;
            let t0 = std::time::Instant::now();
            let o = Oracle::build(g, config)?;
            let counts = o.registry.counts();
            eprintln!(
                "built n={} m={} entries={} (primary/secondary {}, both-primary {}) in {:?}",
                o.n(),
                o.pg.graph.m(),
                counts.total,
                counts.primary_secondary,
                counts.both_primary,
                t0.elapsed()
            );
            let mut w = out_writer(&out)?;
            snapshot::save(&o, &mut w)?;
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Query {
            snapshot,
            s,
            t,
            faults,
            trace,
        } => {
            let o = read_snapshot(&snapshot)?;
            if s >= o.n() || t >= o.n() {
                return Err(format!("vertex out of range (n = {})", o.n()).into());
            }
            if faults.len() > 2 {
                return Err("at most two faults".into());
            }
            let mut edges = Vec::new();
            for f in &faults {
                edges.push(parse_fault(&o.pg.graph, f)?);
            }
            let f = FaultSet::new(&o.pg.graph, &edges);
            let out = if trace {
                query::query_traced(&o, s, t, &f)
            } else {
                query::query(&o, s, t, &f)
            };
            let dist = if out.distance == INF_H {
                "INF".to_string()
            } else {
                out.distance.to_string()
            };
            println!(
                "distance {dist} probes {} certified {}",
                out.probes, out.certified
            );
            if let Some(tr) = &out.trace {
                for ev in &tr.candidates {
                    println!("  candidate {:?}", ev);
                }
            }
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Verify {
            snapshot,
            max_faults,
            out,
        } => {
            let o = read_snapshot(&snapshot)?;
            let limits = SweepLimits {
                include_empty: true,
                include_single: max_faults >= 1,
                include_double: max_faults >= 2,
            };
            let report = verify_exhaustive(&o, limits);
            let mut w = out_writer(&out)?;
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w)?;
            eprintln!(
                "verify: {}/{} matched ({} uncertified, probe max {})",
                report.matches, report.queries, report.uncertified, report.probe_max
            );
            Ok(if report.ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Cmd::Bench {
            snapshot,
            queries,
            seed,
            out,
        } => {
            let o = read_snapshot(&snapshot)?;
            let report = bench(&o, queries, seed);
            let mut w = out_writer(&out)?;
            serde_json::to_writer_pretty(&mut w, &report)?;
            writeln!(w)?;
            eprintln!(
                "bench: {} queries in {:.3}s, probe max {} mean {:.3}",
                report.queries, report.seconds, report.probe_max, report.probe_mean
            );
            Ok(ExitCode::SUCCESS)
        }
        Cmd::Stats { snapshot } => {
            let o = read_snapshot(&snapshot)?;
            let counts = o.registry.counts();
            println!("n {}", o.n());
            println!("m {}", o.pg.graph.m());
            println!("entries {}", counts.total);
            println!("entries-primary-secondary {}", counts.primary_secondary);
            println!("entries-both-primary {}", counts.both_primary);
            for (i, card) in o.landmarks.cardinalities().iter().enumerate() {
                println!("landmark-level {i} {card}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

#[derive(Serialize)]
struct BenchReport {
    queries: u64,
    seconds: f64,
    probe_max: u32,
    probe_mean: f64,
    uncertified: u64,
    /// probe_histogram[i] counts queries with exactly i probes; the last
    /// bucket aggregates everything past it.
    probe_histogram: Vec<u64>,
}

fn bench(o: &Oracle, queries: u64, seed: u64) -> BenchReport {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let n = o.n();
    let m = o.pg.graph.m();
    let mut hist = vec![0u64; 65];
    let mut probe_max = 0u32;
    let mut probe_sum = 0u64;
    let mut uncertified = 0u64;
    let t0 = std::time::Instant::now();
    for _ in 0..queries {
        let s = rng.gen_range(0..n);
        let t = rng.gen_range(0..n);
        let nf = rng.gen_range(0..=2usize.min(m as usize));
        let mut edges = Vec::with_capacity(2);
        for _ in 0..nf {
            edges.push(rng.gen_range(0..m));
        }
        let f = FaultSet::new(&o.pg.graph, &edges);
        let out = query::query(o, s, t, &f);
        probe_max = probe_max.max(out.probes);
        probe_sum += out.probes as u64;
        if !out.certified {
            uncertified += 1;
        }
        let bucket = (out.probes as usize).min(hist.len() - 1);
        hist[bucket] += 1;
    }
    let seconds = t0.elapsed().as_secs_f64();
    BenchReport {
        queries,
        seconds,
        probe_max,
        probe_mean: if queries > 0 {
            probe_sum as f64 / queries as f64
        } else {
            0.0
        },
        uncertified,
        probe_histogram: hist,
    }
}
