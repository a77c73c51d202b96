use greenberg_cli::main_with;
use greenberg_cli::output::{csv_string, parse_csv, TableRow};
use greenberg_core::greenberg::VerificationReport;
use greenberg_core::group_ring::{parse_poly, HowellIdeal};

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("greenberg").chain(args.iter().copied());
    let code = main_with(argv, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

#[test]
fn verify_949_markdown() {
    let (code, out, _) = run(&["verify", "--f", "949"]);
    assert_eq!(code, 0);
    assert!(out.contains("J = (2, T^2)"), "{out}");
    assert!(out.contains("n0 = 2"));
    assert!(out.contains("N = 2^2"));
    assert!(out.contains("criterion (a)"));
}

#[test]
fn even_radicand_is_a_usage_error_with_hint() {
    let (code, out, err) = run(&["verify", "--f", "4"]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("even"), "{err}");
    let (code, _, err) = run(&["verify", "--f", "190"]);
    assert_eq!(code, 1);
    assert!(err.contains("f = 95"), "{err}");
}

#[test]
fn bad_flags_exit_with_usage_code() {
    assert_eq!(run(&["verify"]).0, 1);
    assert_eq!(run(&["frobnicate"]).0, 1);
    assert_eq!(run(&["--help"]).0, 0);
}

#[test]
fn unresolved_run_exits_with_two() {
    // One level with one prime cannot certify 6817.
    let (code, out, _) = run(&["verify", "--f", "6817", "--primes", "1", "--max-level", "1"]);
    assert_eq!(code, 2);
    assert!(out.contains("unresolved after level 1"), "{out}");
}

#[test]
fn five_mod_eight_rows_are_grouped_by_ideal() {
    let (code, out, _) = run(&["table", "--min", "85", "--max", "165", "--class", "5"]);
    assert_eq!(code, 0);
    let row = |j: &str| {
        out.lines()
            .find(|l| l.starts_with(&format!("| {j} |")))
            .unwrap_or_else(|| panic!("{out}"))
            .to_string()
    };
    let first = row("(2, T^2)");
    assert!(
        first.contains("| 2 | 2^2 |") && first.contains("85"),
        "{first}"
    );
    let second = row("(4, 2T, T^2)");
    assert!(
        second.contains("| 2 | 2^3 |") && second.contains("165"),
        "{second}"
    );
    assert!(out.contains("## f ≡ 5 mod 8"));
}

#[test]
fn small_odd_class_numbers_are_trivial() {
    let (code, out, err) = run(&["table", "--min", "3", "--max", "30", "--class", "3,7"]);
    assert_eq!(code, 0);
    assert!(err.contains("skipped"), "{err}");
    let trivial = out
        .split("## trivially stable")
        .nth(1)
        .expect("trivial section");
    let listed: Vec<&str> = trivial.trim().lines().next().unwrap().split(", ").collect();
    assert_eq!(listed, ["3", "7", "11", "19", "23"]);
    // h(Q(√15)) = 2, so 15 is run rather than listed as trivial.
    let computed = out.split("## trivially stable").next().unwrap();
    assert!(computed.contains("| 15 |"), "{out}");
}

#[test]
fn empty_range_gives_empty_table() {
    let (code, out, _) = run(&["table", "--min", "4", "--max", "4"]);
    assert_eq!(code, 0);
    assert!(out.is_empty());
    let (code, out, _) = run(&["table", "--min", "10", "--max", "5", "--format", "json"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "[]");
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = [
        "table", "--min", "85", "--max", "125", "--class", "3,5,7", "--format", "json",
    ];
    let (c1, a, _) = run(&args);
    let (c2, b, _) = run(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
}

#[test]
fn csv_round_trips() {
    let (code, json, _) = run(&[
        "table", "--min", "81", "--max", "170", "--class", "3,5,7", "--format", "json",
    ]);
    assert_eq!(code, 0);
    let reports: Vec<VerificationReport> = serde_json::from_str(&json).unwrap();
    assert!(reports.len() > 10);
    let (_, csv, _) = run(&[
        "table", "--min", "81", "--max", "170", "--class", "3,5,7", "--format", "csv",
    ]);
    assert_eq!(csv, csv_string(&reports).unwrap());
    let rows = parse_csv(&csv).unwrap();
    let expected: Vec<TableRow> = reports.iter().map(TableRow::from_report).collect();
    assert_eq!(rows, expected);
    assert!(csv.starts_with("f,mod8_class,gate,m,criterion,n0,log2_index,generators"));
    for (row, report) in rows.iter().zip(&reports) {
        if let Some(j) = &report.reported_ideal {
            let gens: Vec<Vec<u64>> = row
                .generators
                .split(';')
                .map(|g| parse_poly(g).unwrap())
                .collect();
            let back = HowellIdeal::from_generators(j.spec(), gens.iter());
            assert_eq!(back, j.to_ideal(), "f = {}", row.f);
        }
    }
}

#[test]
fn json_report_carries_level_data() {
    let (code, json, _) = run(&["verify", "--f", "645", "--format", "json"]);
    assert_eq!(code, 0);
    let report: VerificationReport = serde_json::from_str(&json).unwrap();
    assert_eq!(report.ideal_string(), "(8, 2T + 4, T^2 + 4)");
    assert!(report
        .levels
        .iter()
        .all(|l| !l.basis.is_empty() && !l.staircase.is_empty()));
}

#[test]
fn cache_inspect_verify_and_clear() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, cold, _) = run(&["verify", "--f", "949", "--cache-dir", d]);
    assert_eq!(code, 0);
    let (code, warm, err) = run(&["verify", "--f", "949", "--cache-dir", d]);
    assert_eq!(code, 0);
    assert_eq!(cold, warm);
    assert!(err.is_empty(), "{err}");

    let (code, listing, _) = run(&["cache", "inspect", "--cache-dir", d]);
    assert_eq!(code, 0);
    assert!(listing.contains("f = 949 n = 1 records = 15"), "{listing}");
    assert!(listing.contains("f = 949 n = 2 records = 15"), "{listing}");

    let (code, checked, _) = run(&["cache", "inspect", "--verify-cache", "--cache-dir", d]);
    assert_eq!(code, 0);
    assert!(checked.contains(", 0 mismatches"), "{checked}");

    let (code, _, _) = run(&["cache", "clear", "--cache-dir", d]);
    assert_eq!(code, 0);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 0);
    assert_eq!(run(&["cache", "inspect"]).0, 1);
}
