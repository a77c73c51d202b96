//! Front end for the `greenberg` binary: argument handling, range sweeps and
//! output. `run` writes to caller-supplied streams so it can be tested.

pub mod args;
pub mod output;

use std::io::{self, Write};

use greenberg_core::cache::LogCache;
use greenberg_core::greenberg::{
    verify_with, Compute, GreenbergError, RecordSource, VerificationReport, VerifyConfig,
};
use greenberg_core::quadratic::validate_radicand;
use rayon::prelude::*;
use thiserror::Error;

pub use args::{CacheAction, CacheArgs, Cli, Command, Format, RunArgs, TableArgs, VerifyArgs};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_UNRESOLVED: i32 = 2;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] GreenbergError),
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn config(run: &RunArgs) -> VerifyConfig {
    VerifyConfig {
        primes: run.primes,
        max_level: run.max_level,
        adaptive: run.adaptive,
        ..VerifyConfig::default()
    }
}

fn open_cache(run: &RunArgs) -> Result<Option<LogCache>, CliError> {
    match &run.cache_dir {
        Some(dir) => Ok(Some(LogCache::open(dir)?)),
        None => Ok(None),
    }
}

fn verify_one(
    f: u64,
    cfg: &VerifyConfig,
    cache: Option<&LogCache>,
) -> Result<VerificationReport, GreenbergError> {
    let source: &dyn RecordSource = match cache {
        Some(c) => c,
        None => &Compute,
    };
    verify_with(f, cfg, source, |_| {})
}

fn flush_warnings(cache: Option<&LogCache>, err: &mut dyn Write) -> io::Result<()> {
    if let Some(c) = cache {
        for w in c.take_warnings() {
            writeln!(err, "warning: {w}")?;
        }
    }
    Ok(())
}

pub fn cmd_verify(
    a: &VerifyArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, CliError> {
    if let Err(e) = validate_radicand(a.f) {
        return Err(CliError::Usage(e.to_string()));
    }
    let cache = open_cache(&a.run)?;
    let report = verify_one(a.f, &config(&a.run), cache.as_ref())?;
    flush_warnings(cache.as_ref(), err)?;
    match a.run.format {
        Format::Markdown => write!(out, "{}", output::report_markdown(&report, a.run.timings))?,
        Format::Csv => write!(
            out,
            "{}",
            output::csv_string(std::slice::from_ref(&report))?
        )?,
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&report)?)?,
    }
    Ok(if report.is_resolved() {
        EXIT_OK
    } else {
        EXIT_UNRESOLVED
    })
}

/// Odd squarefree radicands in `[min, max]`, and the skipped values.
pub fn radicands_in(min: u64, max: u64) -> (Vec<u64>, Vec<u64>) {
    (min..=max).partition(|&f| validate_radicand(f).is_ok())
}

/// Verifies every radicand on a pool of `jobs` workers; results come back
/// in ascending `f`.
pub fn sweep(
    fs: &[u64],
    cfg: &VerifyConfig,
    cache: Option<&LogCache>,
    jobs: Option<usize>,
) -> Result<Vec<VerificationReport>, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(j) = jobs {
        builder = builder.num_threads(j.max(1));
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start worker pool: {e}")))?;
    let reports = pool.install(|| {
        fs.par_iter()
            .map(|&f| verify_one(f, cfg, cache))
            .collect::<Result<Vec<_>, _>>()
    })?;
    Ok(reports)
}

pub fn cmd_table(a: &TableArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let (mut fs, skipped) = radicands_in(a.min, a.max);
    if !a.class.is_empty() {
        fs.retain(|f| a.class.contains(&(f % 8)));
    }
    if !skipped.is_empty() {
        let list: Vec<String> = skipped.iter().map(u64::to_string).collect();
        writeln!(
            err,
            "note: skipped {} (not odd squarefree ≥ 3; an even f = 2g shares its cyclotomic Z_2-extension with Q(√g))",
            list.join(", ")
        )?;
    }
    let cache = open_cache(&a.run)?;
    let reports = sweep(&fs, &config(&a.run), cache.as_ref(), a.jobs)?;
    flush_warnings(cache.as_ref(), err)?;
    match a.run.format {
        Format::Markdown => write!(out, "{}", output::table_markdown(&reports))?,
        Format::Csv => write!(out, "{}", output::csv_string(&reports)?)?,
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&reports)?)?,
    }
    Ok(if reports.iter().all(VerificationReport::is_resolved) {
        EXIT_OK
    } else {
        EXIT_UNRESOLVED
    })
}

pub fn cmd_cache(a: &CacheArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let dir = a.cache_dir.as_ref().ok_or_else(|| {
        CliError::Usage("no cache directory: pass --cache-dir or set GREENBERG_CACHE".into())
    })?;
    let cache = LogCache::open(dir)?;
    match a.action {
        CacheAction::Inspect { verify_cache } => {
            for e in cache.entries()? {
                write!(out, "f = {} n = {} records = {}", e.f, e.n, e.records)?;
                if e.corrupted > 0 {
                    write!(out, " corrupted = {}", e.corrupted)?;
                }
                writeln!(out, " {}", e.path.display())?;
            }
            if verify_cache {
                let check = cache.verify_sample()?;
                flush_warnings(Some(&cache), err)?;
                writeln!(
                    out,
                    "verified {} sampled records, {} mismatches",
                    check.checked,
                    check.mismatches.len()
                )?;
                for (f, n, r) in &check.mismatches {
                    writeln!(out, "mismatch: f = {f} n = {n} r = {r}")?;
                }
                if !check.mismatches.is_empty() {
                    return Ok(EXIT_UNRESOLVED);
                }
            }
        }
        CacheAction::Clear => {
            let removed = cache.clear()?;
            writeln!(out, "removed {removed} cache files")?;
        }
    }
    Ok(EXIT_OK)
}

pub fn run(cli: &Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    match &cli.command {
        Command::Verify(a) => cmd_verify(a, out, err),
        Command::Table(a) => cmd_table(a, out, err),
        Command::Cache(a) => cmd_cache(a, out, err),
    }
}

/// Parses `argv` and runs it, mapping every failure to an exit code.
pub fn main_with<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    use clap::Parser;
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(err, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(out, "{e}");
            return EXIT_OK;
        }
    };
    match run(&cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            EXIT_USAGE
        }
    }
}
