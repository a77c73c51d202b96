//! On-disk cache of per-prime log records, one text file per `(f, n)`.
//!
//! ```text
//! # greenberg-log-cache v1
//! 949 1 22777 | 0 1 | 0 3 | -
//! ```
//! Each record line is `f n r | eta | beta | delta` with `X`-basis
//! coefficients; `-` marks an absent δ' scalar.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use crate::cyclo_logs::{compute_records, Basis, LogPoly, PrimeLogRecord};
use crate::finite_field::ZetaChoice;
use crate::greenberg::{GreenbergError, RecordSource};
use crate::quadratic::{character_kernel, KernelSet};

pub const CACHE_VERSION: u32 = 1;
const HEADER: &str = "# greenberg-log-cache v1";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CacheEntry {
    pub f: u64,
    pub n: u32,
    pub zeta: ZetaChoice,
    pub records: usize,
    pub corrupted: usize,
    pub path: PathBuf,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CacheCheck {
    pub checked: usize,
    /// `(f, n, r)` of records whose recomputation differs.
    pub mismatches: Vec<(u64, u32, u64)>,
}

pub struct LogCache {
    dir: PathBuf,
    warnings: Mutex<Vec<String>>,
}

fn file_name(f: u64, n: u32, zeta: ZetaChoice) -> String {
    match zeta {
        ZetaChoice::First => format!("f{f}_n{n}.txt"),
        ZetaChoice::Nth(j) => format!("f{f}_n{n}_z{j}.txt"),
    }
}

fn parse_file_name(name: &str) -> Option<(u64, u32, ZetaChoice)> {
    let stem = name.strip_suffix(".txt")?.strip_prefix('f')?;
    let (f, rest) = stem.split_once("_n")?;
    let (n, zeta) = match rest.split_once("_z") {
        Some((n, j)) => (n, ZetaChoice::Nth(j.parse().ok()?)),
        None => (rest, ZetaChoice::First),
    };
    Some((f.parse().ok()?, n.parse().ok()?, zeta))
}

fn format_record(f: u64, n: u32, rec: &PrimeLogRecord) -> String {
    let join = |p: &LogPoly| {
        p.to_x()
            .coeffs
            .iter()
            .map(u64::to_string)
            .collect::<Vec<_>>()
            .join(" ")
    };
    let delta = rec.delta.map_or("-".to_string(), |c| c.to_string());
    format!(
        "{f} {n} {} | {} | {} | {delta}",
        rec.r,
        join(&rec.eta),
        join(&rec.beta)
    )
}

fn parse_record(line: &str, f: u64, n: u32) -> Result<PrimeLogRecord, String> {
    let parts: Vec<&str> = line.split('|').map(str::trim).collect();
    let [head, eta, beta, delta] = parts[..] else {
        return Err("expected four '|'-separated fields".into());
    };
    let head: Vec<&str> = head.split_whitespace().collect();
    let [lf, ln, r] = head[..] else {
        return Err("expected 'f n r'".into());
    };
    if lf.parse::<u64>() != Ok(f) || ln.parse::<u32>() != Ok(n) {
        return Err(format!("line is for ({lf}, {ln}), file is for ({f}, {n})"));
    }
    let r: u64 = r.parse().map_err(|_| format!("bad prime '{r}'"))?;
    let k = n + 1;
    let coeffs = |s: &str| -> Result<LogPoly, String> {
        let v: Vec<u64> = s
            .split_whitespace()
            .map(|c| {
                c.parse::<u64>()
                    .map_err(|_| format!("bad coefficient '{c}'"))
            })
            .collect::<Result<_, _>>()?;
        if v.len() != 1 << n || v.iter().any(|&c| c >> k != 0) {
            return Err("coefficient list has wrong length or range".into());
        }
        Ok(LogPoly::new(n, k, v, Basis::X))
    };
    let delta = match (delta, f % 8 == 1) {
        ("-", false) => None,
        (d, true) => match d.parse::<u64>() {
            Ok(c) if c >> k == 0 => Some(c),
            _ => return Err(format!("bad δ' scalar '{d}'")),
        },
        _ => return Err("δ' presence does not match f mod 8".into()),
    };
    Ok(PrimeLogRecord {
        r,
        eta: coeffs(eta)?,
        beta: coeffs(beta)?,
        delta,
    })
}

impl LogCache {
    pub fn open(dir: impl AsRef<Path>) -> io::Result<Self> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        Ok(LogCache {
            dir,
            warnings: Mutex::new(Vec::new()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    fn warn(&self, msg: String) {
        self.warnings.lock().expect("warning list").push(msg);
    }

    /// Problems met while reading (corrupted lines, bad headers).
    pub fn take_warnings(&self) -> Vec<String> {
        std::mem::take(&mut *self.warnings.lock().expect("warning list"))
    }

    /// Reads the records for `(f, n)`; unreadable lines are reported through
    /// the warning list and left out.
    pub fn load(&self, f: u64, n: u32, zeta: ZetaChoice) -> BTreeMap<u64, PrimeLogRecord> {
        let path = self.dir.join(file_name(f, n, zeta));
        let mut out = BTreeMap::new();
        let Ok(text) = fs::read_to_string(&path) else {
            return out;
        };
        let mut lines = text.lines();
        if lines.next() != Some(HEADER) {
            self.warn(format!(
                "{}: missing or outdated header, ignored",
                path.display()
            ));
            return out;
        }
        for (i, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            match parse_record(line, f, n) {
                Ok(rec) => {
                    out.insert(rec.r, rec);
                }
                Err(e) => self.warn(format!("{}:{}: {e}; skipped", path.display(), i + 2)),
            }
        }
        out
    }

    /// Writes the records for `(f, n)`, replacing the file.
    pub fn store(
        &self,
        f: u64,
        n: u32,
        zeta: ZetaChoice,
        records: &BTreeMap<u64, PrimeLogRecord>,
    ) -> io::Result<()> {
        let path = self.dir.join(file_name(f, n, zeta));
        let mut text = String::from(HEADER);
        text.push('\n');
        for rec in records.values() {
            text.push_str(&format_record(f, n, rec));
            text.push('\n');
        }
        let tmp = path.with_extension("tmp");
        fs::write(&tmp, text)?;
        fs::rename(tmp, path)
    }

    pub fn entries(&self) -> io::Result<Vec<CacheEntry>> {
        let mut out = Vec::new();
        for item in fs::read_dir(&self.dir)? {
            let path = item?.path();
            let Some(name) = path.file_name().and_then(|s| s.to_str()) else {
                continue;
            };
            let Some((f, n, zeta)) = parse_file_name(name) else {
                continue;
            };
            let before = self.warnings.lock().expect("warning list").len();
            let records = self.load(f, n, zeta).len();
            let corrupted = self.warnings.lock().expect("warning list").len() - before;
            out.push(CacheEntry {
                f,
                n,
                zeta,
                records,
                corrupted,
                path,
            });
        }
        out.sort_by_key(|e| (e.f, e.n, e.path.clone()));
        Ok(out)
    }

    /// Removes every cache file; returns how many were removed.
    pub fn clear(&self) -> io::Result<usize> {
        let mut removed = 0;
        for item in fs::read_dir(&self.dir)? {
            let path = item?.path();
            let name = path.file_name().and_then(|s| s.to_str()).unwrap_or("");
            if parse_file_name(name).is_some() {
                fs::remove_file(path)?;
                removed += 1;
            }
        }
        Ok(removed)
    }

    /// Recomputes every tenth record of every file (at least one per file)
    /// and compares.
    pub fn verify_sample(&self) -> Result<CacheCheck, GreenbergError> {
        let mut check = CacheCheck::default();
        let entries = self
            .entries()
            .map_err(|e| GreenbergError::Store(e.to_string()))?;
        for entry in entries {
            let records = self.load(entry.f, entry.n, entry.zeta);
            if records.is_empty() {
                continue;
            }
            let kernel = character_kernel(entry.f)?;
            let sample: Vec<&PrimeLogRecord> = records.values().step_by(10).collect();
            let primes: Vec<u64> = sample.iter().map(|r| r.r).collect();
            let fresh = compute_records(&primes, entry.n, &kernel, entry.zeta)?;
            for (old, new) in sample.iter().zip(&fresh) {
                check.checked += 1;
                if **old != *new {
                    check.mismatches.push((entry.f, entry.n, old.r));
                }
            }
        }
        Ok(check)
    }
}

impl RecordSource for LogCache {
    fn records(
        &self,
        kernel: &KernelSet,
        n: u32,
        primes: &[u64],
        choice: ZetaChoice,
    ) -> Result<Vec<PrimeLogRecord>, GreenbergError> {
        let f = kernel.f;
        let mut known = self.load(f, n, choice);
        let missing: Vec<u64> = primes
            .iter()
            .copied()
            .filter(|r| !known.contains_key(r))
            .collect();
        if !missing.is_empty() {
            for rec in compute_records(&missing, n, kernel, choice)? {
                known.insert(rec.r, rec);
            }
            self.store(f, n, choice, &known)
                .map_err(|e| GreenbergError::Store(e.to_string()))?;
        }
        Ok(primes.iter().map(|r| known[r].clone()).collect())
    }
}
