//! Certification scan over the reduced words of the longest element of F4,
//! in lexicographic order, with JSON-lines checkpoints.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{CertifyOutcome, DescentError, Engine, EngineConfig};
use crate::dynkin::{builtin, CartanData, TypeLabel};
use crate::weyl::{generate_roots, WeylError, WeylTable};

pub const DEFAULT_BATCH: usize = 4096;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("checkpoint {path} is corrupt: {reason}")]
    CheckpointCorrupt { path: PathBuf, reason: String },
    #[error("checkpoint i/o on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("invalid scan mode: {0}")]
    BadMode(String),
    #[error(transparent)]
    Descent(#[from] DescentError),
    #[error("Weyl group error: {0}")]
    Weyl(#[from] WeylError),
    #[error("thread pool: {0}")]
    Pool(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScanMode {
    Full,
    /// `k` words at ranks `floor(j N / k)`, `j = 0..k`.
    Sample(u64),
    /// Ranks in `[start, end)`, 0-based.
    Range(u128, u128),
}

#[derive(Clone, Debug)]
pub struct ScanConfig {
    pub mode: ScanMode,
    pub checkpoint: Option<PathBuf>,
    pub workers: Option<usize>,
    pub batch: usize,
    /// Stop after this many words in the current run.
    pub stop_after: Option<u64>,
    pub time_limit: Option<Duration>,
    pub engine: EngineConfig,
}

impl ScanConfig {
    pub fn new(mode: ScanMode) -> ScanConfig {
        ScanConfig {
            mode,
            checkpoint: None,
            workers: None,
            batch: DEFAULT_BATCH,
            stop_after: None,
            time_limit: None,
            engine: EngineConfig::default(),
        }
    }
}

/// One checkpoint line. Words are 1-based, as in all file formats.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckpointRecord {
    pub last_word: Vec<usize>,
    pub processed: u64,
    pub certified: u64,
    pub failed: u64,
    pub budget_exceeded: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Tally {
    pub processed: u64,
    pub certified: u64,
    pub failed: u64,
    pub budget_exceeded: u64,
}

impl Tally {
    fn record(&mut self, o: CertifyOutcome) {
        self.processed += 1;
        match o {
            CertifyOutcome::Certified => self.certified += 1,
            CertifyOutcome::FailsAt { .. } => self.failed += 1,
            CertifyOutcome::BudgetExceeded { .. } => self.budget_exceeded += 1,
        }
    }

    fn merge(&mut self, o: &Tally) {
        self.processed += o.processed;
        self.certified += o.certified;
        self.failed += o.failed;
        self.budget_exceeded += o.budget_exceeded;
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ScanReport {
    /// Words in the plan for this mode.
    pub planned: u64,
    #[serde(flatten)]
    pub tally: Tally,
    /// Total number of reduced words of the longest element.
    pub total_words: u128,
    /// 1-based.
    pub last_word: Option<Vec<usize>>,
    /// Histogram of the first failing step (1-based) over failed words.
    pub first_failure_steps: std::collections::BTreeMap<usize, u64>,
    pub complete: bool,
    pub resumed: bool,
}

fn corrupt(path: &Path, reason: impl Into<String>) -> ScanError {
    ScanError::CheckpointCorrupt {
        path: path.to_path_buf(),
        reason: reason.into(),
    }
}

/// Latest record of a checkpoint file. A torn final line (no trailing
/// newline) is ignored; any other unparsable line is an error.
pub fn read_checkpoint(path: &Path) -> Result<Option<CheckpointRecord>, ScanError> {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(source) => return Err(ScanError::Io { path: path.into(), source }),
    };
    let torn_tail = !text.is_empty() && !text.ends_with('\n');
    let lines: Vec<&str> = text.lines().collect();
    let mut last = None;
    for (k, line) in lines.iter().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<CheckpointRecord>(line) {
            Ok(rec) => {
                if rec.certified + rec.failed + rec.budget_exceeded != rec.processed {
                    return Err(corrupt(path, format!("line {}: tallies do not add up", k + 1)));
                }
                last = Some(rec);
            }
            Err(_) if torn_tail && k + 1 == lines.len() => {}
            Err(e) => return Err(corrupt(path, format!("line {}: {e}", k + 1))),
        }
    }
    if last.is_none() && !text.trim().is_empty() {
        return Err(corrupt(path, "no valid record"));
    }
    Ok(last)
}

fn append_checkpoint(path: &Path, rec: &CheckpointRecord) -> Result<(), ScanError> {
    let io = |source| ScanError::Io { path: path.into(), source };
    let mut f = OpenOptions::new().create(true).append(true).open(path).map_err(io)?;
    let mut line = serde_json::to_string(rec).expect("record serializes");
    line.push('\n');
    f.write_all(line.as_bytes()).map_err(io)?;
    f.sync_data().map_err(io)
}

/// If the file ends in a torn line, cut it so appends start cleanly.
fn trim_torn_tail(path: &Path) -> Result<(), ScanError> {
    let io = |source| ScanError::Io { path: path.into(), source };
    let f = match File::open(path) {
        Ok(f) => f,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(()),
        Err(e) => return Err(io(e)),
    };
    let mut keep = 0u64;
    let mut reader = BufReader::new(f);
    let mut buf = Vec::new();
    loop {
        buf.clear();
        let n = reader.read_until(b'\n', &mut buf).map_err(io)?;
        if n == 0 || buf.last() != Some(&b'\n') {
            break;
        }
        keep += n as u64;
    }
    OpenOptions::new().write(true).open(path).and_then(|f| f.set_len(keep)).map_err(io)
}

struct Plan {
    mode: ScanMode,
    total: u128,
}

impl Plan {
    fn len(&self) -> u64 {
        match self.mode {
            ScanMode::Full => self.total as u64,
            ScanMode::Range(a, b) => b.min(self.total).saturating_sub(a) as u64,
            ScanMode::Sample(k) => self.sample_ranks(k).len() as u64,
        }
    }

    fn sample_ranks(&self, k: u64) -> Vec<u128> {
        let mut ranks: Vec<u128> = (0..k as u128).map(|j| j * self.total / k as u128).collect();
        ranks.dedup();
        ranks
    }
}

/// Scans the reduced words of the longest element of `c`. `f4_scan` fixes
/// `c` to F4; other types are useful for testing the machinery.
pub fn scan_longest(c: &CartanData, cfg: &ScanConfig) -> Result<ScanReport, ScanError> {
    match cfg.workers {
        Some(w) => rayon::ThreadPoolBuilder::new()
            .num_threads(w.max(1))
            .build()
            .map_err(|e| ScanError::Pool(e.to_string()))?
            .install(|| scan_inner(c, cfg)),
        None => scan_inner(c, cfg),
    }
}

pub fn f4_scan(cfg: &ScanConfig) -> Result<ScanReport, ScanError> {
    let f4 = builtin(TypeLabel::F, 4).expect("F4 is builtin");
    scan_longest(&f4, cfg)
}

fn scan_inner(c: &CartanData, cfg: &ScanConfig) -> Result<ScanReport, ScanError> {
    if let ScanMode::Range(a, b) = cfg.mode {
        if a > b {
            return Err(ScanError::BadMode(format!("range start {a} exceeds end {b}")));
        }
    }
    if cfg.mode == ScanMode::Sample(0) {
        return Err(ScanError::BadMode("sample size must be positive".into()));
    }
    let rs = generate_roots(c)?;
    let table = WeylTable::build(&rs)?;
    let w0 = table.longest();
    let total = table.count(w0)?;
    let plan = Plan { mode: cfg.mode, total };
    let engine = Engine::new(c, cfg.engine)?;

    let mut tally = Tally::default();
    let mut last_rank: Option<u128> = None;
    let mut resumed = false;
    if let Some(path) = &cfg.checkpoint {
        if let Some(rec) = read_checkpoint(path)? {
            let word: Vec<usize> = rec
                .last_word
                .iter()
                .map(|&l| l.checked_sub(1).filter(|&x| x < c.rank()))
                .collect::<Option<_>>()
                .ok_or_else(|| corrupt(path, "letter out of range"))?;
            let rank = table
                .rank_of(w0, &word)
                .map_err(|_| corrupt(path, "last_word is not a reduced word of the longest element"))?;
            if rec.processed > plan.len() {
                return Err(corrupt(path, "more words processed than planned"));
            }
            tally = Tally {
                processed: rec.processed,
                certified: rec.certified,
                failed: rec.failed,
                budget_exceeded: rec.budget_exceeded,
            };
            last_rank = Some(rank);
            resumed = true;
        }
        trim_torn_tail(path)?;
    }

    let planned = plan.len();
    let mut failure_steps = std::collections::BTreeMap::new();
    let started = Instant::now();
    let mut this_run = 0u64;
    let mut interrupted = false;
    let mut last_word: Option<Vec<usize>> = None;

    // Rank cursor: the next plan entry to process.
    let sample = match cfg.mode {
        ScanMode::Sample(k) => Some(plan.sample_ranks(k)),
        _ => None,
    };
    let (mut pos, end): (u128, u128) = match (&sample, cfg.mode) {
        (Some(r), _) => (
            last_rank.map_or(0, |lr| r.partition_point(|&x| x <= lr) as u128),
            r.len() as u128,
        ),
        (None, ScanMode::Range(a, b)) => (last_rank.map_or(a, |lr| (lr + 1).max(a)), b.min(total)),
        _ => (last_rank.map_or(0, |lr| lr + 1), total),
    };
    let rank_at = |p: u128| -> u128 { sample.as_ref().map_or(p, |r| r[p as usize]) };

    let mut cursor: Option<(u128, Vec<usize>)> = None;
    while pos < end {
        if cfg.time_limit.is_some_and(|t| started.elapsed() >= t) || cfg.stop_after.is_some_and(|n| this_run >= n) {
            interrupted = true;
            break;
        }
        let mut n = (cfg.batch.max(1) as u128).min(end - pos);
        if let Some(limit) = cfg.stop_after {
            n = n.min((limit - this_run) as u128);
        }
        let mut words = Vec::with_capacity(n as usize);
        for p in pos..pos + n {
            let rank = rank_at(p);
            let word = match cursor.take() {
                Some((r, mut w)) if r + 1 == rank => {
                    table.next_word(w0, &mut w);
                    w
                }
                _ => table.unrank(w0, rank)?,
            };
            cursor = Some((rank, word.clone()));
            words.push(word);
        }
        let outcomes: Vec<CertifyOutcome> = words.par_iter().map(|w| engine.certify_reduced(w).outcome).collect();
        let mut batch = Tally::default();
        for o in &outcomes {
            batch.record(*o);
            if let CertifyOutcome::FailsAt { step } = o {
                *failure_steps.entry(*step).or_insert(0u64) += 1;
            }
        }
        tally.merge(&batch);
        this_run += n as u64;
        pos += n;
        let lw: Vec<usize> = words.last().expect("nonempty batch").iter().map(|l| l + 1).collect();
        if let Some(path) = &cfg.checkpoint {
            append_checkpoint(
                path,
                &CheckpointRecord {
                    last_word: lw.clone(),
                    processed: tally.processed,
                    certified: tally.certified,
                    failed: tally.failed,
                    budget_exceeded: tally.budget_exceeded,
                },
            )?;
        }
        last_word = Some(lw);
    }

    Ok(ScanReport {
        planned,
        tally,
        total_words: total,
        last_word,
        first_failure_steps: failure_steps,
        complete: !interrupted,
        resumed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b3() -> CartanData {
        builtin(TypeLabel::B, 3).unwrap()
    }

    #[test]
    fn sample_ranks_spread() {
        let p = Plan { mode: ScanMode::Sample(4), total: 10 };
        assert_eq!(p.sample_ranks(4), vec![0, 2, 5, 7]);
        let p = Plan { mode: ScanMode::Sample(20), total: 3 };
        assert_eq!(p.len(), 3);
    }

    #[test]
    fn full_scan_matches_single_word_certification() {
        let c = builtin(TypeLabel::A, 3).unwrap();
        let rep = scan_longest(&c, &ScanConfig::new(ScanMode::Full)).unwrap();
        assert_eq!(rep.total_words, 16);
        assert_eq!(rep.tally.processed, 16);
        assert_eq!(rep.tally.certified, 16);
        assert!(rep.complete);
    }

    #[test]
    fn range_and_worker_independence() {
        let c = builtin(TypeLabel::F, 4).unwrap();
        let mut cfg = ScanConfig::new(ScanMode::Range(10, 400));
        cfg.batch = 37;
        cfg.workers = Some(1);
        let a = scan_longest(&c, &cfg).unwrap();
        cfg.workers = Some(4);
        let b = scan_longest(&c, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.tally.processed, 390);
    }

    #[test]
    fn resume_gives_identical_tallies() {
        let c = builtin(TypeLabel::F, 4).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("scan.jsonl");
        let mut cfg = ScanConfig::new(ScanMode::Sample(300));
        cfg.batch = 16;
        let straight = scan_longest(&c, &cfg).unwrap();

        cfg.checkpoint = Some(path.clone());
        cfg.stop_after = Some(100);
        let first = scan_longest(&c, &cfg).unwrap();
        assert!(!first.complete);
        assert_eq!(first.tally.processed, 100);
        // Simulate a torn write.
        std::fs::OpenOptions::new().append(true).open(&path).unwrap().write_all(b"{\"last_wo").unwrap();
        cfg.stop_after = None;
        let second = scan_longest(&c, &cfg).unwrap();
        assert!(second.resumed && second.complete);
        assert_eq!(second.tally, straight.tally);
        assert_eq!(read_checkpoint(&path).unwrap().unwrap().processed, straight.tally.processed);
    }

    #[test]
    fn corrupt_checkpoint_is_reported() {
        let c = b3();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.jsonl");
        std::fs::write(&path, "not json\n").unwrap();
        let mut cfg = ScanConfig::new(ScanMode::Full);
        cfg.checkpoint = Some(path.clone());
        assert!(matches!(scan_longest(&c, &cfg), Err(ScanError::CheckpointCorrupt { .. })));
        std::fs::write(&path, "{\"last_word\":[1,1],\"processed\":1,\"certified\":1,\"failed\":0,\"budget_exceeded\":0}\n").unwrap();
        assert!(matches!(scan_longest(&c, &cfg), Err(ScanError::CheckpointCorrupt { .. })));
        std::fs::write(&path, "{\"last_word\":[1],\"processed\":2,\"certified\":1,\"failed\":0,\"budget_exceeded\":0}\n").unwrap();
        assert!(matches!(scan_longest(&c, &cfg), Err(ScanError::CheckpointCorrupt { .. })));
    }

    #[test]
    fn last_word_alone() {
        let c = b3();
        let rep = scan_longest(&c, &ScanConfig::new(ScanMode::Range(41, 42))).unwrap();
        assert_eq!(rep.tally.processed, 1);
        let rs = generate_roots(&c).unwrap();
        let t = WeylTable::build(&rs).unwrap();
        let w: Vec<usize> = t.unrank(t.longest(), 41).unwrap().iter().map(|l| l + 1).collect();
        assert_eq!(rep.last_word, Some(w));
    }
}
