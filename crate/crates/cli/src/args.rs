//! Command-line arguments.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "greenberg",
    version,
    about = "Verify Greenberg's conjecture for real quadratic fields Q(√f)"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Verify a single radicand and print its report.
    Verify(VerifyArgs),
    /// Verify every odd squarefree f in a range and group the results by J.
    Table(TableArgs),
    /// Inspect or clear the per-prime log cache.
    Cache(CacheArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    #[value(name = "md", alias = "markdown")]
    Markdown,
    Csv,
    Json,
}

/// Settings shared by `verify` and `table`.
#[derive(Clone, Debug, Args)]
pub struct RunArgs {
    /// Auxiliary primes per level.
    #[arg(long, default_value_t = 15)]
    pub primes: usize,
    #[arg(long, default_value_t = 13)]
    pub max_level: u32,
    /// Keep adding primes until several in a row leave the ideal unchanged.
    #[arg(long)]
    pub adaptive: bool,
    #[arg(long, value_enum, default_value_t = Format::Markdown)]
    pub format: Format,
    /// Cache per-prime logs here (disabled when unset).
    #[arg(long, env = "GREENBERG_CACHE")]
    pub cache_dir: Option<PathBuf>,
    /// Include wall-clock timings in markdown output.
    #[arg(long)]
    pub timings: bool,
}

#[derive(Clone, Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub f: u64,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Clone, Debug, Args)]
pub struct TableArgs {
    #[arg(long)]
    pub min: u64,
    #[arg(long)]
    pub max: u64,
    /// Restrict to these residues of f mod 8 (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub class: Vec<u64>,
    /// Worker threads for the sweep (defaults to the number of CPUs).
    #[arg(long)]
    pub jobs: Option<usize>,
    #[command(flatten)]
    pub run: RunArgs,
}

#[derive(Clone, Debug, Args)]
pub struct CacheArgs {
    #[command(subcommand)]
    pub action: CacheAction,
    #[arg(long, env = "GREENBERG_CACHE", global = true)]
    pub cache_dir: Option<PathBuf>,
}

#[derive(Clone, Debug, Subcommand)]
pub enum CacheAction {
    /// List cached (f, n) entries.
    Inspect {
        /// Recompute a sample of cached records and compare.
        #[arg(long)]
        verify_cache: bool,
    },
    /// Remove every cache file.
    Clear,
}
