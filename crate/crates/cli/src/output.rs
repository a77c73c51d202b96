//! Rendering reports as markdown, csv and json.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use greenberg_core::greenberg::{Criterion, VerificationReport};
use greenberg_core::group_ring::format_poly;
use greenberg_core::quadratic::Gate;
use serde::{Deserialize, Serialize};

/// One csv line per radicand.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TableRow {
    pub f: u64,
    pub mod8_class: u64,
    pub gate: Gate,
    pub m: Option<u32>,
    pub criterion: Option<Criterion>,
    pub n0: Option<u32>,
    pub log2_index: Option<u64>,
    /// Generators of J in `T`, separated by `;`; `1` for the whole ring.
    pub generators: String,
}

impl TableRow {
    pub fn from_report(report: &VerificationReport) -> Self {
        let generators = match (&report.reported_ideal, report.criterion) {
            (Some(j), _) => {
                let polys: Vec<String> = j.generators.iter().map(|g| format_poly(g)).collect();
                polys.join(";")
            }
            (None, Some(Criterion::Trivial)) => "1".to_string(),
            _ => String::new(),
        };
        TableRow {
            f: report.f,
            mod8_class: report.f % 8,
            gate: report.gate,
            m: report.m,
            criterion: report.criterion,
            n0: report.n0,
            log2_index: report.log2_index,
            generators,
        }
    }
}

pub fn csv_string(reports: &[VerificationReport]) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in reports {
        w.serialize(TableRow::from_report(r))?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn parse_csv(text: &str) -> Result<Vec<TableRow>, csv::Error> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect()
}

fn index_string(report: &VerificationReport) -> String {
    match report.log2_index {
        Some(e) => format!("2^{e}"),
        None => "-".to_string(),
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map_or_else(|| "-".to_string(), |x| x.to_string())
}

/// A single report: header facts, the per-level table, then the outcome.
pub fn report_markdown(report: &VerificationReport, timings: bool) -> String {
    let mut out = String::new();
    let split = report.gate == Gate::RunSplit;
    let _ = writeln!(out, "## f = {}", report.f);
    let _ = writeln!(out);
    let _ = writeln!(out, "- gate: {}", report.gate.as_str());
    let _ = writeln!(out, "- class number: {}", report.class_number);
    if let Some(m0) = report.m0 {
        let _ = writeln!(out, "- m0 = {m0}");
    }
    if !report.levels.is_empty() {
        let name = if split { "J'_n" } else { "J_n" };
        let _ = writeln!(out);
        if timings {
            let _ = writeln!(out, "| n | {name} | log2 index | primes | ms |");
            let _ = writeln!(out, "|---|---|---|---|---|");
        } else {
            let _ = writeln!(out, "| n | {name} | log2 index | primes |");
            let _ = writeln!(out, "|---|---|---|---|");
        }
        for l in &report.levels {
            let _ = write!(
                out,
                "| {} | {} | {} | {} |",
                l.n,
                l.ideal,
                l.ideal.log2_index,
                l.primes_used.len()
            );
            if timings {
                let _ = write!(out, " {} |", l.elapsed_ms);
            }
            let _ = writeln!(out);
        }
    }
    let _ = writeln!(out);
    match report.criterion {
        Some(Criterion::Trivial) => {
            let _ = writeln!(
                out,
                "- trivially stable: the 2-class group of Q(√{}) is trivial",
                report.f
            );
        }
        Some(c) => {
            let _ = writeln!(
                out,
                "- terminated at m = {} via criterion ({})",
                opt(report.m),
                c.as_str()
            );
            let _ = writeln!(out, "- stable from level {}", opt(report.stable_from));
        }
        None => {
            let top = report.levels.last().map_or(0, |l| l.n);
            let _ = writeln!(out, "- unresolved after level {top}");
        }
    }
    let _ = writeln!(out, "- J = {}", report.ideal_string());
    let _ = writeln!(out, "- n0 = {}", opt(report.n0));
    let _ = writeln!(out, "- N = {}", index_string(report));
    out
}

fn section_of(report: &VerificationReport) -> usize {
    if report.criterion == Some(Criterion::Trivial) {
        return 3;
    }
    match report.f % 8 {
        3 | 7 => 0,
        5 => 1,
        _ => 2,
    }
}

const SECTIONS: [&str; 4] = [
    "f ≡ 3, 7 mod 8",
    "f ≡ 5 mod 8",
    "f ≡ 1 mod 8",
    "trivially stable",
];

/// Rows grouped by identical J within each congruence class; trivially
/// stable and unresolved radicands are listed separately.
pub fn table_markdown(reports: &[VerificationReport]) -> String {
    let mut out = String::new();
    for (s, title) in SECTIONS.iter().enumerate() {
        let members: Vec<&VerificationReport> = reports
            .iter()
            .filter(|r| section_of(r) == s && (s == 3 || r.is_resolved()))
            .collect();
        if members.is_empty() {
            continue;
        }
        let _ = writeln!(out, "## {title}");
        let _ = writeln!(out);
        if s == 3 {
            let list: Vec<String> = members.iter().map(|r| r.f.to_string()).collect();
            let _ = writeln!(out, "{}", list.join(", "));
            let _ = writeln!(out);
            continue;
        }
        // (n0, log2 N, first f) orders the groups.
        let mut groups: BTreeMap<String, Vec<&VerificationReport>> = BTreeMap::new();
        for r in &members {
            groups.entry(r.ideal_string()).or_default().push(r);
        }
        let mut rows: Vec<(Option<u32>, Option<u64>, u64, String, Vec<u64>)> = groups
            .into_iter()
            .map(|(j, rs)| {
                (
                    rs[0].n0,
                    rs[0].log2_index,
                    rs[0].f,
                    j,
                    rs.iter().map(|r| r.f).collect(),
                )
            })
            .collect();
        rows.sort();
        let _ = writeln!(out, "| J | n0 | N | f |");
        let _ = writeln!(out, "|---|---|---|---|");
        for (n0, log2, _, j, fs) in rows {
            let list: Vec<String> = fs.iter().map(u64::to_string).collect();
            let n = log2.map_or_else(|| "-".to_string(), |e| format!("2^{e}"));
            let _ = writeln!(out, "| {j} | {} | {n} | {} |", opt(n0), list.join(", "));
        }
        let _ = writeln!(out);
    }
    let unresolved: Vec<String> = reports
        .iter()
        .filter(|r| !r.is_resolved())
        .map(|r| r.f.to_string())
        .collect();
    if !unresolved.is_empty() {
        let _ = writeln!(out, "## unresolved");
        let _ = writeln!(out);
        let _ = writeln!(out, "{}", unresolved.join(", "));
        let _ = writeln!(out);
    }
    out
}
