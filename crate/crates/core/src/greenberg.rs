//! Level-by-level computation of the annihilator ideals `J_n` from pairs of
//! split-prime functionals, the two termination tests, and the final report.

use std::collections::HashMap;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cyclo_logs::{compute_records, find_split_primes, CycloError, PrimeLogRecord};
use crate::finite_field::ZetaChoice;
use crate::group_ring::{
    divide_by_aug, norm_element, HowellIdeal, Presentation, ReportedIdeal, RingError, RingSpec,
};
use crate::quadratic::{
    character_kernel, class_number, Gate, KernelSet, QuadFieldInfo, QuadraticError,
};

#[derive(Debug, Error)]
pub enum GreenbergError {
    #[error(transparent)]
    Quadratic(#[from] QuadraticError),
    #[error(transparent)]
    Cyclo(#[from] CycloError),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error("β log at r = {r} is not in the augmentation ideal")]
    BetaNotAugmented { r: u64 },
    #[error("η log at r = {r} is not in the augmentation ideal although f ≡ 1 mod 8")]
    EtaNotAugmented { r: u64 },
    #[error("record for r = {r} lacks the δ' scalar")]
    MissingDelta { r: u64 },
    #[error("f = {f} has gate {gate}; no levels to run")]
    NotRunnable { f: u64, gate: &'static str },
    #[error("record store: {0}")]
    Store(String),
}

/// Where per-prime log records come from (computed, or read from a cache).
pub trait RecordSource: Sync {
    fn records(
        &self,
        kernel: &KernelSet,
        n: u32,
        primes: &[u64],
        choice: ZetaChoice,
    ) -> Result<Vec<PrimeLogRecord>, GreenbergError>;
}

/// Always recomputes.
#[derive(Clone, Copy, Debug, Default)]
pub struct Compute;

impl RecordSource for Compute {
    fn records(
        &self,
        kernel: &KernelSet,
        n: u32,
        primes: &[u64],
        choice: ZetaChoice,
    ) -> Result<Vec<PrimeLogRecord>, GreenbergError> {
        Ok(compute_records(primes, n, kernel, choice)?)
    }
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    /// Number of auxiliary primes per level.
    pub primes: usize,
    pub max_level: u32,
    /// Keep adding primes until this many consecutive primes change nothing.
    pub adaptive: bool,
    pub zeta_choice: ZetaChoice,
}

/// Consecutive no-op primes required before adaptive mode stops.
pub const ADAPTIVE_PATIENCE: usize = 5;
/// Upper bound on primes per level in adaptive mode.
pub const ADAPTIVE_PRIME_LIMIT: usize = 200;

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            primes: 15,
            max_level: 13,
            adaptive: false,
            zeta_choice: ZetaChoice::First,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    /// The quotient is small enough.
    Cardinality,
    /// The norm element annihilates the quotient.
    NormAnnihilation,
    /// The 2-class group is trivial from the start.
    Trivial,
}

impl Criterion {
    pub fn as_str(&self) -> &'static str {
        match self {
            Criterion::Cardinality => "a",
            Criterion::NormAnnihilation => "b",
            Criterion::Trivial => "trivial",
        }
    }
}

/// The level from which the 2-class groups are certified constant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StableFrom {
    Exactly(u32),
    AtMost(u32),
}

impl std::fmt::Display for StableFrom {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StableFrom::Exactly(n) => write!(f, "{n}"),
            StableFrom::AtMost(n) => write!(f, "<= {n}"),
        }
    }
}

/// One computed level.
#[derive(Clone, Debug)]
pub struct LevelResult {
    pub n: u32,
    pub ideal: HowellIdeal,
    pub primes_used: Vec<u64>,
    /// Consecutive insertions at the end that left the ideal unchanged.
    pub stabilized_after: usize,
    /// Consecutive primes at the end whose insertions all were no-ops.
    pub idle_primes: usize,
    pub elapsed_ms: u128,
}

/// Per-level data kept in the report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelSummary {
    pub n: u32,
    pub ideal: ReportedIdeal,
    /// Exponents `e_j`; the quotient is `prod_j Z/2^{e_j}`.
    pub staircase: Vec<u32>,
    /// Reduced basis of the ideal, lowest degree first.
    pub basis: Vec<Vec<u64>>,
    pub primes_used: Vec<u64>,
    pub stabilized_after: usize,
    pub criterion: Option<Criterion>,
    #[serde(skip)]
    pub elapsed_ms: u128,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub f: u64,
    pub gate: Gate,
    pub class_number: u64,
    pub m0: Option<u32>,
    /// Termination level; absent when unresolved or trivial.
    pub m: Option<u32>,
    pub criterion: Option<Criterion>,
    pub stable_from: Option<StableFrom>,
    pub reported_ideal: Option<ReportedIdeal>,
    pub n0: Option<u32>,
    pub log2_index: Option<u64>,
    pub levels: Vec<LevelSummary>,
}

impl VerificationReport {
    pub fn is_resolved(&self) -> bool {
        self.criterion.is_some()
    }

    /// The ideal as written in tables, `(1)` for trivial reports.
    pub fn ideal_string(&self) -> String {
        match (&self.reported_ideal, self.criterion) {
            (Some(j), _) => j.to_string(),
            (None, Some(Criterion::Trivial)) => "(1)".to_string(),
            _ => "-".to_string(),
        }
    }
}

/// The two sides of each pair functional, in the ring where ideals live.
struct PairData {
    spec: RingSpec,
    /// Quotients of the β logs by `T`.
    quotients: Vec<Vec<u64>>,
    /// η logs (divided by `T` in the split case).
    etas: Vec<Vec<u64>>,
}

fn pair_data(records: &[PrimeLogRecord], n: u32, split: bool) -> Result<PairData, GreenbergError> {
    let full = RingSpec::full(n, n + 1);
    let spec = if split {
        RingSpec::divided(n, n + 1)
    } else {
        full.clone()
    };
    let mut quotients = Vec::with_capacity(records.len());
    let mut etas = Vec::with_capacity(records.len());
    for rec in records {
        let beta = rec.beta.to_t().coeffs;
        let q = divide_by_aug(&beta, &full)
            .map_err(|_| GreenbergError::BetaNotAugmented { r: rec.r })?;
        let eta = rec.eta.to_t().coeffs;
        if split {
            let e = divide_by_aug(&eta, &full)
                .map_err(|_| GreenbergError::EtaNotAugmented { r: rec.r })?;
            quotients.push(spec.reduce(&q));
            etas.push(spec.reduce(&e));
        } else {
            quotients.push(q);
            etas.push(eta);
        }
    }
    Ok(PairData {
        spec,
        quotients,
        etas,
    })
}

/// `g_{i,j} = q_i η_j - q_j η_i` for every `i < j` (non-split case).
pub fn build_pair_functionals_nonsplit(
    records: &[PrimeLogRecord],
    n: u32,
) -> Result<Vec<((usize, usize), Vec<u64>)>, GreenbergError> {
    let data = pair_data(records, n, false)?;
    let mut out = Vec::new();
    for j in 0..records.len() {
        for i in 0..j {
            out.push(((i, j), base_product(&data, i, j)));
        }
    }
    Ok(out)
}

fn base_product(data: &PairData, i: usize, j: usize) -> Vec<u64> {
    let s = &data.spec;
    s.sub(
        &s.mul(&data.quotients[i], &data.etas[j]),
        &s.mul(&data.quotients[j], &data.etas[i]),
    )
}

/// First-stage combination `h = (c_j/2^s) f_l - (c_l/2^s) f_j` as sparse
/// coefficients over the primes; `None` when both scalars vanish.
pub fn delta_combination(
    j: usize,
    l: usize,
    c_j: u64,
    c_l: u64,
    k: u32,
) -> Option<[(usize, u64); 2]> {
    let mask = (1u64 << k) - 1;
    let (c_j, c_l) = (c_j & mask, c_l & mask);
    if c_j == 0 && c_l == 0 {
        return None;
    }
    let v = |c: u64| if c == 0 { k } else { c.trailing_zeros().min(k) };
    let s = v(c_j).min(v(c_l));
    Some([(l, c_j >> s), (j, (c_l >> s).wrapping_neg() & mask)])
}

/// All second-stage elements `g_{h,h'}/T` for the split case, in insertion
/// order, computed from scratch (no reduction by an ideal in between).
pub fn build_pair_functionals_split(
    records: &[PrimeLogRecord],
    n: u32,
) -> Result<Vec<Vec<u64>>, GreenbergError> {
    let data = pair_data(records, n, true)?;
    let deltas = deltas(records)?;
    let k = n + 1;
    let mut hs: Vec<[(usize, u64); 2]> = Vec::new();
    let mut out = Vec::new();
    for i in 0..records.len() {
        for j in 0..i {
            let Some(h) = delta_combination(j, i, deltas[j], deltas[i], k) else {
                continue;
            };
            hs.push(h);
            for other in &hs {
                out.push(combine(&data, &h, other, |a, b| base_product(&data, a, b)));
            }
        }
    }
    Ok(out)
}

fn deltas(records: &[PrimeLogRecord]) -> Result<Vec<u64>, GreenbergError> {
    records
        .iter()
        .map(|r| r.delta.ok_or(GreenbergError::MissingDelta { r: r.r }))
        .collect()
}

/// `sum λ_i μ_l g_{i,l}` for sparse `λ`, `μ`.
fn combine(
    data: &PairData,
    lambda: &[(usize, u64); 2],
    mu: &[(usize, u64); 2],
    mut product: impl FnMut(usize, usize) -> Vec<u64>,
) -> Vec<u64> {
    let s = &data.spec;
    let mut acc = s.zero();
    for &(i, a) in lambda {
        for &(l, b) in mu {
            if i == l || a.wrapping_mul(b) & s.mask() == 0 {
                continue;
            }
            let g = product(i, l);
            acc = s.add(&acc, &s.scale(&g, a.wrapping_mul(b)));
        }
    }
    acc
}

/// Pair products reduced lazily against a growing ideal: once the ideal has
/// small normal forms, products of normal forms are cheap.
struct LazyProducts<'a> {
    data: &'a PairData,
    nf_quotients: Vec<Option<Vec<u64>>>,
    nf_etas: Vec<Option<Vec<u64>>>,
    products: HashMap<(usize, usize), Vec<u64>>,
}

impl<'a> LazyProducts<'a> {
    fn new(data: &'a PairData) -> Self {
        let len = data.quotients.len();
        LazyProducts {
            data,
            nf_quotients: vec![None; len],
            nf_etas: vec![None; len],
            products: HashMap::new(),
        }
    }

    /// Forget normal forms after the ideal grew.
    fn invalidate(&mut self) {
        self.nf_quotients.iter_mut().for_each(|x| *x = None);
        self.nf_etas.iter_mut().for_each(|x| *x = None);
    }

    fn nf(slot: &mut Option<Vec<u64>>, src: &[u64], ideal: &HowellIdeal) -> Vec<u64> {
        slot.get_or_insert_with(|| ideal.normal_form(src)).clone()
    }

    /// `g_{i,l}` modulo (some ideal contained in) `ideal`.
    fn product(&mut self, i: usize, l: usize, ideal: &HowellIdeal) -> Vec<u64> {
        if i > l {
            let g = self.product(l, i, ideal);
            return self.data.spec.scale(&g, u64::MAX);
        }
        if let Some(g) = self.products.get(&(i, l)) {
            return g.clone();
        }
        let s = &self.data.spec;
        let qi = Self::nf(&mut self.nf_quotients[i], &self.data.quotients[i], ideal);
        let ql = Self::nf(&mut self.nf_quotients[l], &self.data.quotients[l], ideal);
        let ei = Self::nf(&mut self.nf_etas[i], &self.data.etas[i], ideal);
        let el = Self::nf(&mut self.nf_etas[l], &self.data.etas[l], ideal);
        let g = ideal.normal_form(&s.sub(&s.mul(&qi, &el), &s.mul(&ql, &ei)));
        self.products.insert((i, l), g.clone());
        g
    }
}

/// Accumulates the ideal for one level from the given records, prime by
/// prime. Returns the ideal, trailing no-op insertions and trailing idle
/// primes.
pub fn accumulate_ideal(
    records: &[PrimeLogRecord],
    n: u32,
    split: bool,
) -> Result<(HowellIdeal, usize, usize), GreenbergError> {
    let data = pair_data(records, n, split)?;
    let mut ideal = HowellIdeal::new(data.spec.clone());
    let mut lazy = LazyProducts::new(&data);
    let mut noop_insertions = 0;
    let mut idle_primes = 0;
    let insert = |g: Vec<u64>, ideal: &mut HowellIdeal, lazy: &mut LazyProducts| {
        if ideal.insert(&g) {
            lazy.invalidate();
            true
        } else {
            false
        }
    };
    if split {
        let deltas = deltas(records)?;
        let k = n + 1;
        let mut hs: Vec<[(usize, u64); 2]> = Vec::new();
        for i in 0..records.len() {
            let mut changed = false;
            for j in 0..i {
                let Some(h) = delta_combination(j, i, deltas[j], deltas[i], k) else {
                    continue;
                };
                hs.push(h);
                for other in hs.clone() {
                    let g = combine(&data, &h, &other, |a, b| lazy.product(a, b, &ideal));
                    if insert(g, &mut ideal, &mut lazy) {
                        changed = true;
                        noop_insertions = 0;
                    } else {
                        noop_insertions += 1;
                    }
                }
            }
            idle_primes = if changed { 0 } else { idle_primes + 1 };
        }
    } else {
        for i in 0..records.len() {
            let mut changed = false;
            for j in 0..i {
                let g = lazy.product(j, i, &ideal);
                if insert(g, &mut ideal, &mut lazy) {
                    changed = true;
                    noop_insertions = 0;
                } else {
                    noop_insertions += 1;
                }
            }
            idle_primes = if changed { 0 } else { idle_primes + 1 };
        }
    }
    Ok((ideal, noop_insertions, idle_primes))
}

/// Computes `J_n` (or `J'_n` when `f ≡ 1 mod 8`).
pub fn run_level(
    info: &QuadFieldInfo,
    kernel: &KernelSet,
    n: u32,
    config: &VerifyConfig,
    source: &dyn RecordSource,
) -> Result<LevelResult, GreenbergError> {
    let start = Instant::now();
    let split = match info.gate {
        Gate::RunSplit => true,
        Gate::RunNonsplit => false,
        g => {
            return Err(GreenbergError::NotRunnable {
                f: info.f,
                gate: g.as_str(),
            })
        }
    };
    let mut count = config.primes;
    loop {
        let primes = find_split_primes(info.f, n, count)?;
        let records = source.records(kernel, n, &primes, config.zeta_choice)?;
        let (ideal, stabilized_after, idle_primes) = accumulate_ideal(&records, n, split)?;
        let done =
            !config.adaptive || idle_primes >= ADAPTIVE_PATIENCE || count >= ADAPTIVE_PRIME_LIMIT;
        if done {
            return Ok(LevelResult {
                n,
                ideal,
                primes_used: primes,
                stabilized_after,
                idle_primes,
                elapsed_ms: start.elapsed().as_millis(),
            });
        }
        count = (count + ADAPTIVE_PATIENCE - idle_primes).min(ADAPTIVE_PRIME_LIMIT);
    }
}

/// Applies the termination tests at level `m`.
pub fn check_termination(level: &LevelResult, info: &QuadFieldInfo) -> Option<Criterion> {
    let m = level.n;
    let ideal = &level.ideal;
    let spec = ideal.spec();
    let m0 = info.m0.unwrap_or(0);
    let (power, bound) = match spec.presentation() {
        Presentation::Full => (m, m as u64 + m0 as u64),
        Presentation::Divided => {
            if m < m0 {
                return None;
            }
            (m - m0, m as u64)
        }
    };
    if m == 0 || !ideal.contains(&spec.constant(1u64 << power)) {
        return None;
    }
    if ideal.index_log2() < bound {
        return Some(Criterion::Cardinality);
    }
    if ideal.contains(&norm_element(m - 1, spec)) {
        return Some(Criterion::NormAnnihilation);
    }
    None
}

/// Least `n` with `1 + X + … + X^{2^n - 1}` in the ideal.
pub fn least_norm_level(ideal: &HowellIdeal) -> u32 {
    let spec = ideal.spec();
    let top = spec.n();
    for n in 0..=top {
        if ideal.contains(&norm_element(n, spec)) {
            return n;
        }
    }
    // beyond the level of the ring, N_{n+1} = 2 N_n
    let mut norm = norm_element(top, spec);
    let mut n = top;
    loop {
        n += 1;
        norm = spec.scale(&norm, 2);
        if ideal.contains(&norm) {
            return n;
        }
    }
}

fn summarize(
    level: &LevelResult,
    criterion: Option<Criterion>,
) -> Result<LevelSummary, GreenbergError> {
    Ok(LevelSummary {
        n: level.n,
        ideal: level.ideal.canonical_generators()?,
        staircase: level.ideal.staircase(),
        basis: level.ideal.basis(),
        primes_used: level.primes_used.clone(),
        stabilized_after: level.stabilized_after,
        criterion,
        elapsed_ms: level.elapsed_ms,
    })
}

pub fn trivial_report(info: &QuadFieldInfo) -> VerificationReport {
    VerificationReport {
        f: info.f,
        gate: info.gate,
        class_number: info.h,
        m0: info.m0,
        m: None,
        criterion: Some(Criterion::Trivial),
        stable_from: Some(StableFrom::Exactly(0)),
        reported_ideal: None,
        n0: Some(0),
        log2_index: Some(0),
        levels: Vec::new(),
    }
}

pub fn verify(f: u64, config: &VerifyConfig) -> Result<VerificationReport, GreenbergError> {
    verify_with(f, config, &Compute, |_| {})
}

/// Runs levels `1, 2, …` until a termination test passes or the level cap
/// is reached. `on_level` sees each level as soon as it is done.
pub fn verify_with(
    f: u64,
    config: &VerifyConfig,
    source: &dyn RecordSource,
    mut on_level: impl FnMut(&LevelSummary),
) -> Result<VerificationReport, GreenbergError> {
    let info = class_number(f)?;
    match info.gate {
        Gate::TriviallyStable => return Ok(trivial_report(&info)),
        Gate::Excluded => {
            return Err(GreenbergError::NotRunnable {
                f,
                gate: info.gate.as_str(),
            })
        }
        _ => {}
    }
    let kernel = character_kernel(f)?;
    let mut report = VerificationReport {
        f,
        gate: info.gate,
        class_number: info.h,
        m0: info.m0,
        m: None,
        criterion: None,
        stable_from: None,
        reported_ideal: None,
        n0: None,
        log2_index: None,
        levels: Vec::new(),
    };
    for n in 1..=config.max_level {
        let level = run_level(&info, &kernel, n, config, source)?;
        let criterion = check_termination(&level, &info);
        let summary = summarize(&level, criterion)?;
        on_level(&summary);
        report.levels.push(summary);
        if let Some(c) = criterion {
            let reported = level.ideal.canonical_generators()?;
            report.m = Some(n);
            report.criterion = Some(c);
            report.stable_from = Some(match c {
                Criterion::NormAnnihilation => StableFrom::Exactly(n - 1),
                _ => StableFrom::AtMost(n - 1),
            });
            report.n0 = Some(least_norm_level(&level.ideal));
            report.log2_index = Some(reported.log2_index);
            report.reported_ideal = Some(reported);
            break;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cyclo_logs::{Basis, LogPoly};
    use crate::group_ring::parse_poly;

    fn p(s: &str) -> Vec<u64> {
        parse_poly(s).unwrap()
    }

    /// Records built from published T-basis values at level 1 for f = 949.
    fn published_949_level_one() -> Vec<PrimeLogRecord> {
        let rows = [
            (22777, "T", "3"),
            (45553, "3T + 2", "3"),
            (60737, "3T", "3"),
            (68329, "2T + 2", "2"),
            (136657, "3T", "1"),
            (151841, "0", "2"),
        ];
        let spec = RingSpec::full(1, 2);
        rows.iter()
            .map(|&(r, eta, beta_over_t)| {
                let eta = spec.reduce(&p(eta));
                let beta = spec.mul_t(&spec.reduce(&p(beta_over_t)));
                PrimeLogRecord {
                    r,
                    eta: LogPoly::new(1, 2, eta, Basis::T),
                    beta: LogPoly::new(1, 2, beta, Basis::T),
                    delta: None,
                }
            })
            .collect()
    }

    #[test]
    fn pair_from_published_values() {
        let records = published_949_level_one();
        let pairs = build_pair_functionals_nonsplit(&records, 1).unwrap();
        let spec = RingSpec::full(1, 2);
        let (_, g) = pairs.iter().find(|(ij, _)| *ij == (0, 3)).unwrap();
        // 3(2T + 2) - 2T = 4T + 6 ≡ 2
        assert_eq!(*g, spec.constant(2));
        let ideal = HowellIdeal::from_generators(spec.clone(), pairs.iter().map(|(_, g)| g));
        assert_eq!(ideal, HowellIdeal::from_generators(spec, [p("2")].iter()));
    }

    #[test]
    fn pair_antisymmetry() {
        let records = published_949_level_one();
        let data = pair_data(&records, 1, false).unwrap();
        for i in 0..records.len() {
            assert_eq!(base_product(&data, i, i), data.spec.zero());
            for j in 0..records.len() {
                let a = base_product(&data, i, j);
                let b = base_product(&data, j, i);
                assert_eq!(data.spec.add(&a, &b), data.spec.zero());
            }
        }
    }

    #[test]
    fn delta_combination_examples() {
        assert_eq!(delta_combination(0, 1, 0, 0, 3), None);
        // c = (4, 2): s = 1, h = 2 f_1 - 1 f_0
        assert_eq!(delta_combination(0, 1, 4, 2, 3), Some([(1, 2), (0, 7)]));
        // c = (0, 4): s = 2, h = 0 f_1 - 1 f_0
        assert_eq!(delta_combination(0, 1, 0, 4, 3), Some([(1, 0), (0, 7)]));
        // the combination kills δ: (c_j/2^s) c_l - (c_l/2^s) c_j = 0
        for cj in 0..16u64 {
            for cl in 0..16u64 {
                if let Some([(_, a), (_, b)]) = delta_combination(0, 1, cj, cl, 4) {
                    assert_eq!((a * cl + b * cj) % 16, 0);
                }
            }
        }
    }

    #[test]
    fn f949_levels() {
        let info = class_number(949).unwrap();
        let kernel = character_kernel(949).unwrap();
        let config = VerifyConfig::default();
        let l1 = run_level(&info, &kernel, 1, &config, &Compute).unwrap();
        let want = HowellIdeal::from_generators(RingSpec::full(1, 2), [p("2")].iter());
        assert_eq!(l1.ideal, want);
        assert_eq!(check_termination(&l1, &info), None);
        let l2 = run_level(&info, &kernel, 2, &config, &Compute).unwrap();
        let want = HowellIdeal::from_generators(RingSpec::full(2, 3), [p("2"), p("T^2")].iter());
        assert_eq!(l2.ideal, want);
        assert_eq!(check_termination(&l2, &info), Some(Criterion::Cardinality));
        assert_eq!(least_norm_level(&l2.ideal), 2);
    }

    #[test]
    fn lazy_accumulation_matches_direct_generation() {
        let kernel = character_kernel(949).unwrap();
        for n in 1..=3 {
            let primes = find_split_primes(949, n, 8).unwrap();
            let records = compute_records(&primes, n, &kernel, ZetaChoice::First).unwrap();
            let direct = build_pair_functionals_nonsplit(&records, n).unwrap();
            let spec = RingSpec::full(n, n + 1);
            let want = HowellIdeal::from_generators(spec, direct.iter().map(|(_, g)| g));
            let (got, _, _) = accumulate_ideal(&records, n, false).unwrap();
            assert_eq!(got, want);
        }
        let kernel = character_kernel(6817).unwrap();
        for n in 1..=2 {
            let primes = find_split_primes(6817, n, 6).unwrap();
            let records = compute_records(&primes, n, &kernel, ZetaChoice::First).unwrap();
            let direct = build_pair_functionals_split(&records, n).unwrap();
            let spec = RingSpec::divided(n, n + 1);
            let want = HowellIdeal::from_generators(spec, direct.iter());
            let (got, _, _) = accumulate_ideal(&records, n, true).unwrap();
            assert_eq!(got, want);
        }
    }

    #[test]
    fn functionals_vanish_on_beta_and_delta() {
        // ψ = q_i f_j - q_j f_i evaluated on β gives q_i β_j - q_j β_i = 0
        let kernel = character_kernel(6817).unwrap();
        let n = 2;
        let primes = find_split_primes(6817, n, 5).unwrap();
        let records = compute_records(&primes, n, &kernel, ZetaChoice::First).unwrap();
        let full = RingSpec::full(n, n + 1);
        let betas: Vec<Vec<u64>> = records.iter().map(|r| r.beta.to_t().coeffs).collect();
        let qs: Vec<Vec<u64>> = betas
            .iter()
            .map(|b| divide_by_aug(b, &full).unwrap())
            .collect();
        for i in 0..records.len() {
            for j in 0..records.len() {
                let v = full.sub(&full.mul(&qs[i], &betas[j]), &full.mul(&qs[j], &betas[i]));
                assert_eq!(v, full.zero());
            }
        }
        for rec in &records {
            assert_eq!(rec.eta.augmentation(), 0);
            assert_eq!(rec.beta.augmentation(), 0);
        }
    }

    #[test]
    fn trivial_gate_short_circuits() {
        let report = verify(3, &VerifyConfig::default()).unwrap();
        assert_eq!(report.criterion, Some(Criterion::Trivial));
        assert!(report.levels.is_empty());
        assert_eq!(report.ideal_string(), "(1)");
        assert!(verify(4, &VerifyConfig::default()).is_err());
    }
}
