//! The prime search: for each odd prime `p` in range compute `t = ord2(p)`,
//! apply the `3t^2 <= 4p` and odd-t filters, and test the survivors for
//! three p-th roots of unity summing to zero.
//!
//! Primes are processed in chunks on a worker pool; each chunk's records
//! are merged in prime order, appended to the checkpoint sidecar, and the
//! checkpoint is rewritten atomically. Randomized steps draw seeds derived
//! from `(seed, p)` or `(seed, t)`, so output never depends on scheduling.

use std::collections::HashMap;
use std::fs::{self, File, OpenOptions};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rayon::prelude::*;
use sha2::{Digest, Sha256};

use crate::algebra::binfield::{build_field, BinaryFieldCtx};
use crate::algebra::numtheory::PrimeCtx;
use crate::algebra::sieve::sieve_primes;
use crate::pipeline::export::{read_jsonl_records, write_records, ExportFormat};
use crate::pipeline::record::{SearchRecord, Summary, TestMethod};
use crate::rootsum::{
    class_test_3, extract_witness_3, gcd_test_3, necessary_cond_3, odd_t_filter, sufficient_cond_3,
    RootsOfUnity,
};
use crate::{seed, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Class,
    Gcd,
    /// Runs both deciders and aborts if they disagree.
    Both,
}

impl Method {
    pub fn as_str(self) -> &'static str {
        match self {
            Method::Class => "class",
            Method::Gcd => "gcd",
            Method::Both => "both",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "class" => Ok(Method::Class),
            "gcd" => Ok(Method::Gcd),
            "both" => Ok(Method::Both),
            _ => Err(Error::Parse(format!("unknown method `{s}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RunConfig {
    pub lo: u64,
    pub hi: u64,
    pub method: Method,
    /// Worker threads; 0 uses the pool default.
    pub threads: usize,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
    /// Record wall-clock milliseconds per prime; off keeps exports
    /// byte-identical across runs.
    pub timing: bool,
    /// Largest `p` the gcd decider is run on.
    pub gcd_max_p: u64,
    /// Primes per chunk (checkpoint granularity).
    pub chunk: usize,
    /// Stop after this many chunks, leaving the checkpoint in place.
    pub stop_after_chunks: Option<usize>,
}

impl RunConfig {
    pub fn new(lo: u64, hi: u64) -> Self {
        RunConfig {
            lo,
            hi,
            method: Method::Class,
            threads: 0,
            seed: 0,
            out: None,
            checkpoint: None,
            timing: false,
            gcd_max_p: u64::MAX,
            chunk: 1 << 15,
            stop_after_chunks: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.hi < self.lo {
            return Err(Error::usage(format!(
                "empty range [{}, {}]",
                self.lo, self.hi
            )));
        }
        if self.chunk == 0 || self.gcd_max_p == 0 {
            return Err(Error::usage("caps must be positive"));
        }
        Ok(())
    }

    /// Hex SHA-256 over every setting that affects output. Thread count,
    /// paths and chunking are excluded.
    pub fn fingerprint(&self) -> String {
        let canonical = format!(
            "lo={};hi={};method={};seed={};timing={};gcd_max_p={}",
            self.lo,
            self.hi,
            self.method.as_str(),
            self.seed,
            self.timing,
            self.gcd_max_p
        );
        hex::encode(Sha256::digest(canonical.as_bytes()))
    }
}

/// Result of a (possibly interrupted) run.
#[derive(Debug, Clone)]
pub struct SearchOutcome {
    pub records: Vec<SearchRecord>,
    pub summary: Summary,
    /// False when stopped early by `stop_after_chunks`.
    pub complete: bool,
}

/// Line 1: config fingerprint. Line 2: last fully processed prime followed
/// by the counters as `key=value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Checkpoint {
    pub fingerprint: String,
    pub last_prime: u64,
    pub summary: Summary,
}

impl Checkpoint {
    pub fn render(&self) -> String {
        let counters: Vec<String> = self
            .summary
            .fields()
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        format!(
            "{}\n{} {}\n",
            self.fingerprint,
            self.last_prime,
            counters.join(" ")
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines();
        let fingerprint = lines
            .next()
            .ok_or_else(|| Error::Parse("empty checkpoint".into()))?
            .trim()
            .to_string();
        let second = lines
            .next()
            .ok_or_else(|| Error::Parse("checkpoint lacks the prime line".into()))?;
        let mut parts = second.split_whitespace();
        let last_prime = parts
            .next()
            .and_then(|x| x.parse().ok())
            .ok_or_else(|| Error::Parse("bad last prime".into()))?;
        let mut summary = Summary::default();
        for kv in parts {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("bad counter `{kv}`")))?;
            summary.set(
                k,
                v.parse()
                    .map_err(|_| Error::Parse(format!("bad counter `{kv}`")))?,
            )?;
        }
        Ok(Checkpoint {
            fingerprint,
            last_prime,
            summary,
        })
    }

    /// Write-temp-then-rename.
    pub fn store(&self, path: &Path) -> Result<()> {
        let tmp = path.with_extension("tmp");
        {
            let mut f = File::create(&tmp)?;
            f.write_all(self.render().as_bytes())?;
            f.sync_all()?;
        }
        fs::rename(tmp, path)?;
        Ok(())
    }
}

pub fn sidecar_path(checkpoint: &Path) -> PathBuf {
    let mut s = checkpoint.as_os_str().to_owned();
    s.push(".records.jsonl");
    PathBuf::from(s)
}

/// Fields are built once per extension degree, from a seed derived from
/// `(run seed, t)`.
struct FieldCache {
    seed: u64,
    fields: Mutex<HashMap<u64, Arc<BinaryFieldCtx>>>,
}

impl FieldCache {
    fn get(&self, t: u64) -> Result<Arc<BinaryFieldCtx>> {
        if let Some(f) = self.fields.lock().expect("field cache poisoned").get(&t) {
            return Ok(f.clone());
        }
        let field = build_field(t as usize, seed::derive(self.seed, t | 1 << 63))?;
        Ok(self
            .fields
            .lock()
            .expect("field cache poisoned")
            .entry(t)
            .or_insert(field)
            .clone())
    }
}

/// Filter outcome for one prime: `None` if it fails a filter.
fn process_prime(
    p: u64,
    config: &RunConfig,
    fields: &FieldCache,
) -> Result<(bool, Option<SearchRecord>)> {
    let start = Instant::now();
    let ctx = PrimeCtx::new(p)?;
    let t = ctx.t;
    let nec3 = necessary_cond_3(p, t);
    if !nec3 {
        return Ok((false, None));
    }
    let odd_t = odd_t_filter(p, t);
    if !odd_t {
        return Ok((true, None));
    }
    let weil = sufficient_cond_3(p, t);
    let prime_seed = seed::derive(config.seed, p);
    let class_witness = |fields: &FieldCache| -> Result<Option<Vec<u64>>> {
        let roots = RootsOfUnity::with_field(p, fields.get(t)?, prime_seed)?;
        match class_test_3(&roots) {
            None => Ok(None),
            Some(_) => Ok(Some(extract_witness_3(&roots)?.exponents)),
        }
    };
    let gcd_allowed = p <= config.gcd_max_p;
    let (dep, method, witness) = match config.method {
        Method::Class => {
            let w = class_witness(fields)?;
            (w.is_some(), TestMethod::Class, w)
        }
        Method::Gcd => {
            if !gcd_allowed {
                return Err(Error::ResourceLimit(format!(
                    "p = {p} exceeds the gcd cap {}",
                    config.gcd_max_p
                )));
            }
            (gcd_test_3(p)?, TestMethod::Gcd, None)
        }
        Method::Both => {
            let w = class_witness(fields)?;
            if gcd_allowed {
                let g = gcd_test_3(p)?;
                if g != w.is_some() {
                    return Err(Error::Verification(format!(
                        "p = {p}: gcd test says {g}, class test says {}",
                        w.is_some()
                    )));
                }
            }
            (w.is_some(), TestMethod::Class, w)
        }
    };
    let ms = if config.timing {
        start.elapsed().as_millis() as u64
    } else {
        0
    };
    let record = SearchRecord {
        p,
        t,
        nec3,
        odd_t,
        weil,
        dep,
        method,
        witness,
        ms,
    };
    record.check_soundness()?;
    Ok((true, Some(record)))
}

/// Runs the search, resuming from `config.checkpoint` if it exists, and
/// writes `config.out` when the range is finished.
pub fn run_search(config: &RunConfig) -> Result<SearchOutcome> {
    config.validate()?;
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if config.threads > 0 {
            b = b.num_threads(config.threads);
        }
        b.build()
            .map_err(|e| Error::usage(format!("thread pool: {e}")))?
    };
    let fingerprint = config.fingerprint();
    let mut summary = Summary {
        lo: config.lo,
        hi: config.hi,
        ..Summary::default()
    };
    let mut records: Vec<SearchRecord> = Vec::new();
    let mut resume_after = 0u64;

    if let Some(cp_path) = &config.checkpoint {
        if cp_path.exists() {
            let cp = Checkpoint::parse(&fs::read_to_string(cp_path)?)?;
            if cp.fingerprint != fingerprint {
                return Err(Error::usage(format!(
                    "checkpoint {} belongs to a different configuration",
                    cp_path.display()
                )));
            }
            resume_after = cp.last_prime;
            summary = cp.summary;
            let side = sidecar_path(cp_path);
            if side.exists() {
                records = read_jsonl_records(BufReader::new(File::open(&side)?))?;
                records.retain(|r| r.p <= resume_after);
            }
            // Drop anything appended after the checkpoint was written.
            let mut w = BufWriter::new(File::create(&side)?);
            for r in &records {
                serde_json::to_writer(&mut w, r)?;
                w.write_all(b"\n")?;
            }
            w.flush()?;
            log::info!(
                "resuming after p = {resume_after} with {} records",
                records.len()
            );
        } else {
            File::create(sidecar_path(cp_path))?;
        }
    }

    let fields = FieldCache {
        seed: config.seed,
        fields: Mutex::new(HashMap::new()),
    };
    let start = config.lo.max(3).max(resume_after + 1);
    let mut primes = if start <= config.hi {
        Some(sieve_primes(start, config.hi))
    } else {
        None
    };
    let mut chunks_done = 0usize;
    let mut complete = true;
    while let Some(stream) = primes.as_mut() {
        let chunk: Vec<u64> = stream.by_ref().take(config.chunk).collect();
        if chunk.is_empty() {
            break;
        }
        if config.stop_after_chunks.is_some_and(|n| chunks_done >= n) {
            complete = false;
            break;
        }
        let results: Vec<(bool, Option<SearchRecord>)> = pool.install(|| {
            chunk
                .par_iter()
                .map(|&p| process_prime(p, config, &fields))
                .collect::<Result<_>>()
        })?;
        let mut fresh = Vec::new();
        for (passed_nec3, rec) in results {
            summary.primes += 1;
            summary.nec3 += passed_nec3 as u64;
            if let Some(r) = rec {
                summary.odd_t += 1;
                summary.deps += r.dep as u64;
                summary.non_weil_deps += (r.dep && !r.weil) as u64;
                fresh.push(r);
            }
        }
        let last = *chunk.last().expect("nonempty chunk");
        if let Some(cp_path) = &config.checkpoint {
            let mut side = OpenOptions::new()
                .append(true)
                .open(sidecar_path(cp_path))?;
            for r in &fresh {
                serde_json::to_writer(&mut side, r)?;
                side.write_all(b"\n")?;
            }
            side.sync_all()?;
            Checkpoint {
                fingerprint: fingerprint.clone(),
                last_prime: last,
                summary: summary.clone(),
            }
            .store(cp_path)?;
        }
        records.extend(fresh);
        chunks_done += 1;
        log::info!(
            "through p = {last}: {} primes, {} survivors, {} dependencies",
            summary.primes,
            summary.odd_t,
            summary.deps
        );
    }
    if complete {
        if let Some(out) = &config.out {
            let mut w = BufWriter::new(File::create(out)?);
            write_records(&mut w, ExportFormat::from_path(out), &records, &summary)?;
            w.flush()?;
        }
    }
    Ok(SearchOutcome {
        records,
        summary,
        complete,
    })
}
