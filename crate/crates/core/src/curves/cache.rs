//! Append-only CSV cache of Frobenius traces.
//!
//! One file may hold traces of several curves. Rows are `family,param,c,p,t`.
//! A sweep loads what is already there, computes only the missing primes and
//! appends them, so an interrupted sweep resumes where it stopped.

use std::collections::BTreeMap;
use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Seek, SeekFrom};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{sweep_traces, CurveSpec, Family, TraceMethod, TraceRecord};
use crate::error::Result;

#[derive(Debug, Serialize, Deserialize)]
struct Row {
    family: Family,
    param: u32,
    c: i64,
    p: u64,
    t: i64,
}

#[derive(Clone, Debug)]
pub struct TraceCache {
    path: PathBuf,
}

impl TraceCache {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    /// Every record in the file, in file order. A missing file is an empty cache.
    pub fn load_all(&self) -> Result<Vec<TraceRecord>> {
        if !self.path.exists() {
            return Ok(Vec::new());
        }
        let mut reader = csv::Reader::from_path(&self.path)?;
        let mut out = Vec::new();
        for row in reader.deserialize::<Row>() {
            let row = row?;
            let spec = CurveSpec::new(row.family, row.param, row.c)?;
            out.push(TraceRecord { spec, p: row.p, t: row.t });
        }
        Ok(out)
    }

    /// Cached traces of one curve keyed by prime.
    pub fn load(&self, spec: &CurveSpec) -> Result<BTreeMap<u64, i64>> {
        Ok(self
            .load_all()?
            .into_iter()
            .filter(|r| r.spec == *spec)
            .map(|r| (r.p, r.t))
            .collect())
    }

    pub fn append(&self, records: &[TraceRecord]) -> Result<()> {
        if records.is_empty() {
            return Ok(());
        }
        if let Some(dir) = self.path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        let mut file: File = OpenOptions::new().create(true).append(true).open(&self.path)?;
        let empty = file.seek(SeekFrom::End(0))? == 0;
        let mut writer = csv::WriterBuilder::new()
            .has_headers(empty)
            .from_writer(BufWriter::new(file));
        for r in records {
            writer.serialize(Row {
                family: r.spec.family(),
                param: r.spec.param(),
                c: r.spec.c(),
                p: r.p,
                t: r.t,
            })?;
        }
        writer.flush()?;
        Ok(())
    }

    /// Traces at every good prime in `primes`, sorted by p. Missing primes are
    /// computed directly and appended to the cache.
    pub fn sweep(&self, spec: &CurveSpec, primes: &[u64]) -> Result<Vec<TraceRecord>> {
        let known = self.load(spec)?;
        let missing: Vec<u64> = primes
            .iter()
            .copied()
            .filter(|p| spec.is_good_prime(*p) && !known.contains_key(p))
            .collect();
        let fresh = sweep_traces(spec, &missing, TraceMethod::Direct)?;
        self.append(&fresh)?;
        let mut all: BTreeMap<u64, i64> = known;
        all.extend(fresh.iter().map(|r| (r.p, r.t)));
        Ok(primes
            .iter()
            .filter(|p| spec.is_good_prime(**p))
            .map(|&p| TraceRecord { spec: *spec, p, t: all[&p] })
            .collect())
    }

    /// Like [`TraceCache::sweep`], but with [`TraceMethod::FactorSum`] the
    /// traces of a first-family curve are sums of cached factor traces.
    pub fn sweep_by(&self, spec: &CurveSpec, primes: &[u64], method: TraceMethod) -> Result<Vec<TraceRecord>> {
        if method == TraceMethod::Direct || spec.family() == Family::TwoPowPlusOne {
            return self.sweep(spec, primes);
        }
        let mut total: BTreeMap<u64, i64> = BTreeMap::new();
        for factor in spec.factors() {
            for r in self.sweep(&factor, primes)? {
                *total.entry(r.p).or_insert(0) += r.t;
            }
        }
        Ok(total
            .into_iter()
            .map(|(p, t)| TraceRecord { spec: *spec, p, t })
            .collect())
    }
}
