//! Versioned binary snapshot of a built oracle.
//!
//! Stored verbatim: config, edge list, perturbation values, landmark bitsets,
//! and the maximiser pair tables. Trees, the single-fault index, and the LCA
//! tables are recomputed on load from the stored perturbation — they are pure
//! functions of it, so a load equals a rebuild bit for bit, without paying
//! for the largest structures twice on disk.
//!
//! All integers little-endian. Layout: magic "FTDO", version u32, config
//! block, graph block, perturbation block, landmark block, registry block.

use std::io::{Read, Write};

use crate::config::Config;
use crate::error::{BuildError, SnapshotError};
use crate::graph::Graph;
use crate::landmarks::LandmarkSets;
use crate::maximiser::{MaximiserRegistry, PairRecord, PairTable};
use crate::oracle::Oracle;

const MAGIC: [u8; 4] = *b"FTDO";
const VERSION: u32 = 1;

struct W<'a, T: Write>(&'a mut T);

impl<T: Write> W<'_, T> {
    fn u8(&mut self, v: u8) -> Result<(), SnapshotError> {
        Ok(self.0.write_all(&[v])?)
    }
    fn u32(&mut self, v: u32) -> Result<(), SnapshotError> {
        Ok(self.0.write_all(&v.to_le_bytes())?)
    }
    fn u64(&mut self, v: u64) -> Result<(), SnapshotError> {
        Ok(self.0.write_all(&v.to_le_bytes())?)
    }
    fn f64(&mut self, v: f64) -> Result<(), SnapshotError> {
        Ok(self.0.write_all(&v.to_le_bytes())?)
    }
}

struct R<'a, T: Read>(&'a mut T);

impl<T: Read> R<'_, T> {
    fn u8(&mut self) -> Result<u8, SnapshotError> {
        let mut b = [0u8; 1];
        self.0.read_exact(&mut b)?;
        Ok(b[0])
    }
    fn u32(&mut self) -> Result<u32, SnapshotError> {
        let mut b = [0u8; 4];
        self.0.read_exact(&mut b)?;
        Ok(u32::from_le_bytes(b))
    }
    fn u64(&mut self) -> Result<u64, SnapshotError> {
        let mut b = [0u8; 8];
        self.0.read_exact(&mut b)?;
        Ok(u64::from_le_bytes(b))
    }
    fn f64(&mut self) -> Result<f64, SnapshotError> {
        let mut b = [0u8; 8];
        self.0.read_exact(&mut b)?;
        Ok(f64::from_le_bytes(b))
    }
}

pub fn save<T: Write>(o: &Oracle, out: &mut T) -> Result<(), SnapshotError> {
    let mut w = W(out);
    w.0.write_all(&MAGIC)?;
    w.u32(VERSION)?;

    let c = &o.config;
    w.u64(c.seed)?;
    w.f64(c.landmark_c)?;
    w.f64(c.epsilon)?;
    w.u8(c.strict as u8)?;
    w.u64(c.mem_cap_records)?;
    w.u64(c.jobs as u64)?;
    w.u32(c.dclose_factor)?;
    w.u32(c.max_reroutes)?;
    w.u32(c.tie_retries)?;

    let g = &o.pg.graph;
    w.u32(g.n())?;
    w.u32(g.m())?;
    for &(u, v) in g.edge_list() {
        w.u32(u)?;
        w.u32(v)?;
    }

    w.u64(o.pg.seed)?;
    for &r in &o.pg.perturbation {
        w.u64(r)?;
    }

    let lm = &o.landmarks;
    w.u32(lm.levels().len() as u32)?;
    for level in lm.levels() {
        w.u32(level.len() as u32)?;
        for &word in level {
            w.u64(word)?;
        }
    }

    let tables = o.registry.tables();
    w.u64(tables.len() as u64)?;
    for tbl in tables {
        for recs in [&tbl.ps, &tbl.bp] {
            w.u32(recs.len() as u32)?;
            for r in recs {
                w.u32(r.x)?;
                w.u32(r.y)?;
                w.u32(r.len)?;
                w.u8(r.flags)?;
            }
        }
    }
    Ok(())
}

pub fn load<T: Read>(input: &mut T) -> Result<Oracle, SnapshotError> {
    let mut r = R(input);
    let mut magic = [0u8; 4];
    r.0.read_exact(&mut magic)?;
    if magic != MAGIC {
        return Err(SnapshotError::BadMagic);
    }
    let version = r.u32()?;
    if version != VERSION {
        return Err(SnapshotError::BadVersion(version));
    }

    let config = Config {
        seed: r.u64()?,
        landmark_c: r.f64()?,
        epsilon: r.f64()?,
        strict: r.u8()? != 0,
        mem_cap_records: r.u64()?,
        jobs: r.u64()? as usize,
        dclose_factor: r.u32()?,
        max_reroutes: r.u32()?,
        tie_retries: r.u32()?,
    };

    let n = r.u32()?;
    let m = r.u32()?;
    let mut edges = Vec::with_capacity(m as usize);
    for _ in 0..m {
        let u = r.u32()?;
        let v = r.u32()?;
        edges.push((u, v));
    }
    let graph =
        Graph::new(n, &edges).map_err(|_| SnapshotError::Corrupt("invalid edge list"))?;

    let pseed = r.u64()?;
    let mut perturbation = Vec::with_capacity(m as usize);
    for _ in 0..m {
        perturbation.push(r.u64()?);
    }

    let level_count = r.u32()?;
    let words_per_level = (n as usize).div_ceil(64);
    let mut levels = Vec::with_capacity(level_count as usize);
    for _ in 0..level_count {
        let words = r.u32()? as usize;
        if words != words_per_level {
            return Err(SnapshotError::Corrupt("landmark bitset size"));
        }
        let mut level = Vec::with_capacity(words);
        for _ in 0..words {
            level.push(r.u64()?);
        }
        levels.push(level);
    }
    let landmarks = LandmarkSets::from_levels(n, config.landmark_c, config.seed, levels);

    let table_count = r.u64()?;
    if table_count != (n as u64) * (n as u64) {
        return Err(SnapshotError::Corrupt("table count"));
    }
    let mut tables = Vec::with_capacity(table_count as usize);
    for _ in 0..table_count {
        let mut tbl = PairTable::default();
        for recs in [&mut tbl.ps, &mut tbl.bp] {
            let k = r.u32()?;
            recs.reserve(k as usize);
            for _ in 0..k {
                let rec = PairRecord {
                    x: r.u32()?,
                    y: r.u32()?,
                    len: r.u32()?,
                    flags: r.u8()?,
                };
                if rec.x >= m || rec.y >= m {
                    return Err(SnapshotError::Corrupt("record edge id"));
                }
                recs.push(rec);
            }
        }
        tables.push(tbl);
    }
    let registry = MaximiserRegistry::from_tables(n, tables);

    Oracle::assemble(graph, pseed, perturbation, landmarks, registry, config).map_err(|e| match e {
        BuildError::TieDetected { .. } | BuildError::TieRetriesExhausted { .. } => {
            SnapshotError::Corrupt("stored perturbation has ties")
        }
        _ => SnapshotError::Corrupt("rebuild failed"),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testutil::{c5, grid};

    fn roundtrip(g: Graph) {
        let a = Oracle::build(g, Config::default()).unwrap();
        let mut buf = Vec::new();
        save(&a, &mut buf).unwrap();
        let b = load(&mut buf.as_slice()).unwrap();
        assert_eq!(a.pg.perturbation, b.pg.perturbation);
        assert_eq!(a.spts, b.spts);
        assert_eq!(a.registry.tables(), b.registry.tables());
        assert_eq!(a.landmarks.levels(), b.landmarks.levels());
        // Re-serialising the loaded oracle is byte-identical.
        let mut buf2 = Vec::new();
        save(&b, &mut buf2).unwrap();
        assert_eq!(buf, buf2);
    }

    #[test]
    fn roundtrips() {
        roundtrip(c5());
        roundtrip(grid(3, 3));
    }

    #[test]
    fn rejects_bad_magic_and_version() {
        let a = Oracle::build(c5(), Config::default()).unwrap();
        let mut buf = Vec::new();
        save(&a, &mut buf).unwrap();
        let mut bad = buf.clone();
        bad[0] = b'X';
        assert!(matches!(
            load(&mut bad.as_slice()),
            Err(SnapshotError::BadMagic)
        ));
        let mut badv = buf.clone();
        badv[4] = 99;
        assert!(matches!(
            load(&mut badv.as_slice()),
            Err(SnapshotError::BadVersion(_))
        ));
    }

    #[test]
    fn rejects_truncation() {
        let a = Oracle::build(c5(), Config::default()).unwrap();
        let mut buf = Vec::new();
        save(&a, &mut buf).unwrap();
        buf.truncate(buf.len() - 3);
        assert!(load(&mut buf.as_slice()).is_err());
    }
}
