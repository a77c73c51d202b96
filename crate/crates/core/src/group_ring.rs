//! Arithmetic in `Z/2^d[T]/(p(T))` where `p` is either `(T+1)^{2^n} - 1` (the
//! group ring of a cyclic group of order `2^n` written in `T = X - 1`) or that
//! relation divided by `T`.
//!
//! Ideals are kept as a reduced strong Gröbner basis over `Z/2^d[T]` that
//! always contains the relation. In one variable this is the same data as a
//! Howell form of the ideal viewed as a `Z/2^d`-module: every element has a
//! leading term `2^e T^j`, and the staircase `e_j` (smallest exponent reachable
//! at degree `j`) determines membership and index.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RingError {
    #[error("element is not in the augmentation ideal (constant term {0} in T-basis)")]
    NotAugmented(u64),
    #[error("generator list does not regenerate the ideal it was derived from")]
    RoundTrip,
    #[error("coefficient exponent d = {0} is out of range (1..=62)")]
    BadPrecision(u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Presentation {
    /// Relation `(T+1)^{2^n} - 1`.
    Full,
    /// Relation `((T+1)^{2^n} - 1) / T`.
    Divided,
}

/// The ring `Z/2^d[T]/(relation)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingSpec {
    n: u32,
    d: u32,
    presentation: Presentation,
    /// Monic relation, `rank + 1` coefficients, lowest degree first.
    relation: Vec<u64>,
}

/// Inverse of an odd number modulo `2^64`.
pub(crate) fn inv_odd(a: u64) -> u64 {
    debug_assert!(a & 1 == 1);
    let mut x = a; // correct to 3 bits
    for _ in 0..5 {
        x = x.wrapping_mul(2u64.wrapping_sub(a.wrapping_mul(x)));
    }
    x
}

/// `C(m, j) mod 2^64` for `j = 0..=m`, tracking the 2-adic valuation apart so
/// the running quotient stays exact.
fn binomials_mod_2_64(m: u64) -> Vec<u64> {
    let mut out = Vec::with_capacity(m as usize + 1);
    let mut odd: u64 = 1;
    let mut val: u32 = 0;
    out.push(1);
    for j in 1..=m {
        let num = m - j + 1;
        let den = j;
        let (vn, vd) = (num.trailing_zeros(), den.trailing_zeros());
        odd = odd.wrapping_mul(num >> vn).wrapping_mul(inv_odd(den >> vd));
        val = val + vn - vd;
        out.push(if val >= 64 { 0 } else { odd << val });
    }
    out
}

impl RingSpec {
    pub fn new(n: u32, d: u32, presentation: Presentation) -> Result<Self, RingError> {
        if d == 0 || d > 62 {
            return Err(RingError::BadPrecision(d));
        }
        assert!(n < 31, "level too large");
        let size = 1u64 << n;
        let mask = (1u64 << d) - 1;
        let binom = binomials_mod_2_64(size);
        let relation: Vec<u64> = match presentation {
            // (T+1)^N - 1 = sum_{j>=1} C(N, j) T^j
            Presentation::Full => std::iter::once(0)
                .chain(binom[1..].iter().map(|c| c & mask))
                .collect(),
            // coefficient of T^j is C(N, j+1)
            Presentation::Divided => binom[1..].iter().map(|c| c & mask).collect(),
        };
        Ok(RingSpec {
            n,
            d,
            presentation,
            relation,
        })
    }

    pub fn full(n: u32, d: u32) -> Self {
        Self::new(n, d, Presentation::Full).expect("valid precision")
    }

    pub fn divided(n: u32, d: u32) -> Self {
        Self::new(n, d, Presentation::Divided).expect("valid precision")
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn presentation(&self) -> Presentation {
        self.presentation
    }

    pub fn rank(&self) -> usize {
        self.relation.len() - 1
    }

    pub fn mask(&self) -> u64 {
        (1u64 << self.d) - 1
    }

    pub fn relation(&self) -> &[u64] {
        &self.relation
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.rank()]
    }

    pub fn one(&self) -> Vec<u64> {
        let mut v = self.zero();
        if !v.is_empty() {
            v[0] = 1;
        }
        v
    }

    pub fn constant(&self, c: u64) -> Vec<u64> {
        let mut v = self.zero();
        if !v.is_empty() {
            v[0] = c & self.mask();
        }
        v
    }

    /// Reduces an arbitrary polynomial (wrapping `u64` coefficients) modulo
    /// the relation and `2^d`.
    pub fn reduce(&self, poly: &[u64]) -> Vec<u64> {
        let rank = self.rank();
        let mut c: Vec<u64> = poly.to_vec();
        reduce_by_monic(&mut c, &self.relation);
        c.resize(rank, 0);
        let mask = self.mask();
        c.iter_mut().for_each(|x| *x &= mask);
        c
    }

    /// Reduces a polynomial with signed coefficients.
    pub fn from_signed(&self, poly: &[i64]) -> Vec<u64> {
        let v: Vec<u64> = poly.iter().map(|&x| x as u64).collect();
        self.reduce(&v)
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mask = self.mask();
        a.iter()
            .zip(b)
            .map(|(x, y)| x.wrapping_add(*y) & mask)
            .collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mask = self.mask();
        a.iter()
            .zip(b)
            .map(|(x, y)| x.wrapping_sub(*y) & mask)
            .collect()
    }

    pub fn scale(&self, a: &[u64], s: u64) -> Vec<u64> {
        let mask = self.mask();
        a.iter().map(|x| x.wrapping_mul(s) & mask).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        poly_mul_mod(a, b, self)
    }

    /// `a · T`.
    pub fn mul_t(&self, a: &[u64]) -> Vec<u64> {
        let mut v = Vec::with_capacity(a.len() + 1);
        v.push(0);
        v.extend_from_slice(a);
        self.reduce(&v)
    }
}

/// Subtracts multiples of a monic polynomial until `c` has degree below it.
fn reduce_by_monic(c: &mut Vec<u64>, monic: &[u64]) {
    let deg = monic.len() - 1;
    if c.len() <= deg {
        return;
    }
    for top in (deg..c.len()).rev() {
        let lead = c[top];
        if lead == 0 {
            continue;
        }
        let shift = top - deg;
        for (i, &m) in monic[..deg].iter().enumerate() {
            c[shift + i] = c[shift + i].wrapping_sub(lead.wrapping_mul(m));
        }
        c[top] = 0;
    }
    c.truncate(deg);
}

/// Schoolbook product followed by division by the monic relation.
pub fn poly_mul_mod(a: &[u64], b: &[u64], spec: &RingSpec) -> Vec<u64> {
    let da = degree(a);
    let db = degree(b);
    let (Some(da), Some(db)) = (da, db) else {
        return spec.zero();
    };
    let mut prod = vec![0u64; da + db + 1];
    for (i, &x) in a[..=da].iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b[..=db].iter().enumerate() {
            prod[i + j] = prod[i + j].wrapping_add(x.wrapping_mul(y));
        }
    }
    spec.reduce(&prod)
}

/// Canonical quotient of an augmentation-ideal element by `T`: the constant
/// term is dropped and the remaining coefficients shift down one place. The
/// result is returned in the same ring.
pub fn divide_by_aug(p: &[u64], spec: &RingSpec) -> Result<Vec<u64>, RingError> {
    let mask = spec.mask();
    let c0 = p.first().copied().unwrap_or(0) & mask;
    if c0 != 0 {
        return Err(RingError::NotAugmented(c0));
    }
    let mut q: Vec<u64> = p.iter().skip(1).map(|x| x & mask).collect();
    q.resize(spec.rank(), 0);
    Ok(q)
}

/// `sum_{i < 2^m} (T+1)^i`, reduced in `spec`.
pub fn norm_element(m: u32, spec: &RingSpec) -> Vec<u64> {
    // sum_{i<2^m} (T+1)^i = ((T+1)^{2^m} - 1)/T, coefficient of T^j is C(2^m, j+1)
    let binom = binomials_mod_2_64(1u64 << m);
    spec.reduce(&binom[1..])
}

fn degree(p: &[u64]) -> Option<usize> {
    p.iter().rposition(|&c| c != 0)
}

fn trim(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

/// A basis element together with its leading data.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Lead {
    poly: Vec<u64>,
    deg: usize,
    exp: u32,
}

impl Lead {
    /// Normalizes so the leading coefficient is exactly `2^e`.
    fn new(mut poly: Vec<u64>, mask: u64) -> Option<Lead> {
        poly.iter_mut().for_each(|c| *c &= mask);
        trim(&mut poly);
        let deg = poly.len().checked_sub(1)?;
        let lc = poly[deg];
        let exp = lc.trailing_zeros();
        let unit_inv = inv_odd(lc >> exp);
        if unit_inv != 1 {
            poly.iter_mut()
                .for_each(|c| *c = c.wrapping_mul(unit_inv) & mask);
        }
        Some(Lead { poly, deg, exp })
    }

    fn divides(&self, deg: usize, exp: u32) -> bool {
        self.deg <= deg && self.exp <= exp
    }
}

/// An ideal of `Z/2^d[T]/(relation)` in canonical (Howell) form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HowellIdeal {
    spec: RingSpec,
    /// Reduced strong Gröbner basis over `Z/2^d[T]`, sorted by degree.
    basis: Vec<Lead>,
}

impl HowellIdeal {
    /// The zero ideal.
    pub fn new(spec: RingSpec) -> Self {
        let relation = Lead::new(spec.relation.clone(), spec.mask()).expect("relation is monic");
        HowellIdeal {
            spec,
            basis: vec![relation],
        }
    }

    pub fn from_generators<'a, I>(spec: RingSpec, gens: I) -> Self
    where
        I: IntoIterator<Item = &'a Vec<u64>>,
    {
        let mut ideal = Self::new(spec);
        for g in gens {
            ideal.insert(g);
        }
        ideal
    }

    pub fn spec(&self) -> &RingSpec {
        &self.spec
    }

    /// Adds `g` (any polynomial; reduced on entry). Returns whether the ideal
    /// grew.
    ///
    /// Leading terms `2^e T^j` of a minimal basis form a staircase, and the
    /// syzygies of a staircase are generated by neighbouring corners, with
    /// `2^d = 0` acting as an extra corner at degree 0. So only S-polynomials
    /// of neighbours are checked.
    pub fn insert(&mut self, g: &[u64]) -> bool {
        let g = self.spec.reduce(g);
        if self.normal_form_raw(g.clone()).is_empty() {
            return false;
        }
        let mask = self.spec.mask();
        let d = self.spec.d;
        let mut next_id = 0usize;
        let mut basis: Vec<(usize, Lead)> = std::mem::take(&mut self.basis)
            .into_iter()
            .map(|b| {
                next_id += 1;
                (next_id, b)
            })
            .collect();
        let mut checked: HashSet<(usize, usize)> = HashSet::new();
        let mut pending = vec![g];
        loop {
            while let Some(h) = pending.pop() {
                let leads: Vec<Lead> = basis.iter().map(|(_, b)| b.clone()).collect();
                let Some(h) = Lead::new(reduce_full(h, &leads, mask), mask) else {
                    continue;
                };
                // h is not divisible by any lead; drop the leads it divides
                let (keep, dropped): (Vec<_>, Vec<_>) = basis
                    .into_iter()
                    .partition(|(_, b)| !h.divides(b.deg, b.exp));
                pending.extend(dropped.into_iter().map(|(_, b)| b.poly));
                basis = keep;
                next_id += 1;
                basis.push((next_id, h));
                basis.sort_by_key(|(_, b)| b.deg);
            }
            let leads: Vec<Lead> = basis.iter().map(|(_, b)| b.clone()).collect();
            // neighbour pairs, the virtual corner 2^d (id 0) first
            let mut found = None;
            for i in 0..basis.len() {
                let (id_b, b) = &basis[i];
                let (id_a, s) = if i == 0 {
                    let shift = 1u64 << (d - b.exp);
                    (
                        0,
                        b.poly
                            .iter()
                            .map(|c| c.wrapping_mul(shift) & mask)
                            .collect(),
                    )
                } else {
                    let (id_a, a) = &basis[i - 1];
                    (*id_a, s_poly(a, b, mask))
                };
                if !checked.insert((id_a, *id_b)) {
                    continue;
                }
                let r = reduce_full(s, &leads, mask);
                if !r.is_empty() {
                    found = Some(r);
                    break;
                }
            }
            match found {
                Some(r) => pending.push(r),
                None => break,
            }
        }
        self.basis = minimize(basis.into_iter().map(|(_, b)| b).collect(), mask);
        true
    }

    /// Returns a copy with `g` inserted.
    pub fn with(&self, g: &[u64]) -> Self {
        let mut out = self.clone();
        out.insert(g);
        out
    }

    fn normal_form_raw(&self, p: Vec<u64>) -> Vec<u64> {
        let mut r = reduce_full(p, &self.basis, self.spec.mask());
        trim(&mut r);
        r
    }

    /// Canonical representative of `p` modulo the ideal: coefficient `j`
    /// lies in `[0, 2^{e_j})`.
    pub fn normal_form(&self, p: &[u64]) -> Vec<u64> {
        let mut r = self.normal_form_raw(self.spec.reduce(p));
        r.resize(self.spec.rank(), 0);
        r
    }

    pub fn contains(&self, p: &[u64]) -> bool {
        self.normal_form_raw(self.spec.reduce(p)).is_empty()
    }

    /// `e_j` for `j < rank`: the quotient is `prod_j Z/2^{e_j}` as a group.
    pub fn staircase(&self) -> Vec<u32> {
        let d = self.spec.d;
        let mut out = vec![d; self.spec.rank()];
        for (j, e) in out.iter_mut().enumerate() {
            for b in &self.basis {
                if b.deg <= j {
                    *e = (*e).min(b.exp);
                }
            }
        }
        out
    }

    /// `log_2` of the cardinality of the quotient ring.
    pub fn index_log2(&self) -> u64 {
        self.staircase().iter().map(|&e| e as u64).sum()
    }

    pub fn is_whole_ring(&self) -> bool {
        self.basis.first().is_some_and(|b| b.deg == 0 && b.exp == 0)
    }

    /// Smallest `e` with `2^e` in the ideal, if any below `d`.
    pub fn two_power_exponent(&self) -> Option<u32> {
        self.basis.first().filter(|b| b.deg == 0).map(|b| b.exp)
    }

    /// Reduced basis polynomials (lowest degree first), the relation
    /// included when it is not implied by the others.
    pub fn basis(&self) -> Vec<Vec<u64>> {
        self.basis.iter().map(|b| b.poly.clone()).collect()
    }

    /// Dense Howell rows: one row per degree `j < rank` with `e_j < d`, whose
    /// leading entry `2^{e_j}` sits at column `j` and whose lower entries are
    /// reduced. Rows are listed from the highest pivot down.
    pub fn howell_rows(&self) -> Vec<Vec<u64>> {
        let rank = self.spec.rank();
        let mask = self.spec.mask();
        let mut rows = Vec::new();
        for j in (0..rank).rev() {
            let Some(b) = self.basis.iter().rev().find(|b| b.deg <= j) else {
                continue;
            };
            if b.exp >= self.spec.d {
                continue;
            }
            let mut shifted = vec![0u64; j - b.deg];
            shifted.extend_from_slice(&b.poly);
            let lead = shifted[j];
            shifted[j] = 0;
            let mut tail = self.normal_form(&shifted);
            tail[j] = lead & mask;
            rows.push(tail);
        }
        rows
    }

    /// Generators of the preimage of this ideal in `Z[T]`: the reduced basis
    /// (one element per corner of the staircase, the relation included when
    /// it is not implied), with `2^d` in front when no smaller power of 2 lies
    /// in the ideal.
    pub fn canonical_generators(&self) -> Result<ReportedIdeal, RingError> {
        let d = self.spec.d;
        let mut generators = self.basis();
        if self.two_power_exponent().is_none() {
            generators.insert(0, vec![1u64 << d]);
        }
        let reported = ReportedIdeal {
            generators,
            log2_index: self.index_log2(),
            n: self.spec.n,
            d,
            presentation: self.spec.presentation,
        };
        if reported.to_ideal() != *self {
            return Err(RingError::RoundTrip);
        }
        Ok(reported)
    }
}

/// Strong reduction: repeatedly cancels the leading term while some basis
/// element has a dividing leading term, then continues on lower terms.
fn reduce_full(mut p: Vec<u64>, basis: &[Lead], mask: u64) -> Vec<u64> {
    p.iter_mut().for_each(|c| *c &= mask);
    let mut top = p.len();
    while top > 0 {
        let j = top - 1;
        let c = p[j];
        if c == 0 {
            top -= 1;
            continue;
        }
        // basis element of largest degree <= j has smallest exponent there
        let Some(b) = basis.iter().filter(|b| b.deg <= j).min_by_key(|b| b.exp) else {
            top -= 1;
            continue;
        };
        let q = c >> b.exp;
        if q == 0 {
            top -= 1;
            continue;
        }
        let shift = j - b.deg;
        for (i, &x) in b.poly.iter().enumerate() {
            p[shift + i] = p[shift + i].wrapping_sub(q.wrapping_mul(x)) & mask;
        }
        // coefficient j is now c mod 2^{exp}; move on
        debug_assert!(p[j] < (1 << b.exp));
        top -= 1;
    }
    trim(&mut p);
    p
}

fn s_poly(a: &Lead, b: &Lead, mask: u64) -> Vec<u64> {
    let e = a.exp.max(b.exp);
    let deg = a.deg.max(b.deg);
    let mut out = vec![0u64; deg + 1];
    let sa = 1u64 << (e - a.exp);
    let sb = 1u64 << (e - b.exp);
    for (i, &x) in a.poly.iter().enumerate() {
        let k = i + deg - a.deg;
        out[k] = out[k].wrapping_add(x.wrapping_mul(sa));
    }
    for (i, &x) in b.poly.iter().enumerate() {
        let k = i + deg - b.deg;
        out[k] = out[k].wrapping_sub(x.wrapping_mul(sb));
    }
    out.iter_mut().for_each(|c| *c &= mask);
    out
}

/// Drops elements whose leading term is divisible by another's and
/// tail-reduces the survivors.
fn minimize(mut basis: Vec<Lead>, mask: u64) -> Vec<Lead> {
    basis.sort_by_key(|b| (b.deg, b.exp));
    let mut kept: Vec<Lead> = Vec::new();
    for b in basis {
        if kept.iter().any(|k| k.divides(b.deg, b.exp)) {
            continue;
        }
        kept.push(b);
    }
    // kept: degrees increasing, exponents strictly decreasing
    for i in 0..kept.len() {
        let lead_deg = kept[i].deg;
        let mut p = kept[i].poly.clone();
        let lead = p[lead_deg];
        p[lead_deg] = 0;
        let others: Vec<Lead> = kept[..i].to_vec();
        let mut tail = reduce_full(p, &others, mask);
        tail.resize(lead_deg + 1, 0);
        tail[lead_deg] = lead;
        kept[i].poly = tail;
    }
    kept
}

/// An ideal in the form it is reported: generators with nonnegative integer
/// coefficients in `T`, understood together with `2^d` and the relation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportedIdeal {
    /// Coefficient lists, lowest degree first.
    pub generators: Vec<Vec<u64>>,
    pub log2_index: u64,
    pub n: u32,
    pub d: u32,
    pub presentation: Presentation,
}

impl ReportedIdeal {
    pub fn spec(&self) -> RingSpec {
        RingSpec::new(self.n, self.d, self.presentation).expect("valid precision")
    }

    pub fn to_ideal(&self) -> HowellIdeal {
        HowellIdeal::from_generators(self.spec(), self.generators.iter())
    }

    /// Same ideal in the same ring.
    pub fn same_ideal(&self, other: &ReportedIdeal) -> bool {
        self.spec() == other.spec() && self.to_ideal() == other.to_ideal()
    }

    pub fn contains(&self, p: &[u64]) -> bool {
        self.to_ideal().contains(p)
    }
}

impl fmt::Display for ReportedIdeal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.generators.iter().map(|g| format_poly(g)).collect();
        write!(f, "({})", parts.join(", "))
    }
}

/// Renders a coefficient list as `T^2 + 2T + 4`.
pub fn format_poly(coeffs: &[u64]) -> String {
    let mut terms = Vec::new();
    for (j, &c) in coeffs.iter().enumerate().rev() {
        if c == 0 {
            continue;
        }
        let var = match j {
            0 => String::new(),
            1 => "T".to_string(),
            _ => format!("T^{j}"),
        };
        terms.push(match (c, j) {
            (_, 0) => c.to_string(),
            (1, _) => var,
            _ => format!("{c}{var}"),
        });
    }
    if terms.is_empty() {
        "0".to_string()
    } else {
        terms.join(" + ")
    }
}

/// Parses the output of [`format_poly`].
pub fn parse_poly(s: &str) -> Option<Vec<u64>> {
    let s = s.trim();
    if s == "0" {
        return Some(vec![]);
    }
    let mut out: Vec<u64> = Vec::new();
    for term in s.split('+') {
        let term = term.trim();
        let (coef, deg) = match term.find('T') {
            None => (term.parse().ok()?, 0usize),
            Some(pos) => {
                let c = if pos == 0 {
                    1
                } else {
                    term[..pos].parse().ok()?
                };
                let rest = &term[pos + 1..];
                let deg = if rest.is_empty() {
                    1
                } else {
                    rest.strip_prefix('^')?.parse().ok()?
                };
                (c, deg)
            }
        };
        if out.len() <= deg {
            out.resize(deg + 1, 0);
        }
        out[deg] += coef;
    }
    Some(out)
}
