//! Invariants of the real quadratic field `Q(√f)`: its quadratic character,
//! class number (by counting cycles of reduced indefinite forms), the norm of
//! the fundamental unit, and the resulting classification of `f`.

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finite_field::{is_prime, is_squarefree};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum QuadraticError {
    #[error("f = 2 generates the same cyclotomic Z_2-extension as Q; nothing to verify")]
    Two,
    #[error("f = {f} is even; Q(√{f}) and Q(√{half}) share their cyclotomic Z_2-extension beyond level 0, run f = {half} instead")]
    Even { f: u64, half: u64 },
    #[error("f = {0} is not squarefree")]
    NotSquarefree(u64),
    #[error("f = {0} is below 3")]
    TooSmall(u64),
}

/// Checks the standing hypotheses on the radicand.
pub fn validate_radicand(f: u64) -> Result<(), QuadraticError> {
    match f {
        2 => Err(QuadraticError::Two),
        _ if f < 3 => Err(QuadraticError::TooSmall(f)),
        _ if f % 2 == 0 => Err(QuadraticError::Even { f, half: f / 2 }),
        _ if !is_squarefree(f) => Err(QuadraticError::NotSquarefree(f)),
        _ => Ok(()),
    }
}

/// Jacobi symbol `(a | m)` for odd positive `m`.
pub fn jacobi(a: i64, m: u64) -> i32 {
    assert!(m % 2 == 1, "Jacobi symbol needs an odd modulus");
    let mut a = a.rem_euclid(m as i64) as u64;
    let mut m = m;
    let mut sign = 1;
    while a != 0 {
        let tz = a.trailing_zeros();
        a >>= tz;
        if tz % 2 == 1 && (m % 8 == 3 || m % 8 == 5) {
            sign = -sign;
        }
        if a % 4 == 3 && m % 4 == 3 {
            sign = -sign;
        }
        std::mem::swap(&mut a, &mut m);
        a %= m;
    }
    if m == 1 {
        sign
    } else {
        0
    }
}

/// Kronecker symbol `(D | a)` for `a ≥ 1`.
pub fn kronecker(d: i64, a: u64) -> i32 {
    assert!(a >= 1);
    let tz = a.trailing_zeros();
    let odd = a >> tz;
    let mut result = 1;
    if tz > 0 {
        if d % 2 == 0 {
            return 0;
        }
        let two = match d.rem_euclid(8) {
            1 | 7 => 1,
            _ => -1,
        };
        if tz % 2 == 1 {
            result = two;
        }
    }
    if odd == 1 {
        return result;
    }
    // (D | odd) through the Jacobi symbol; reciprocity is folded into jacobi().
    result * jacobi(d, odd)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SignCase {
    /// `f ≡ 1 mod 4`; the character of `Q(√f)`.
    ChiF,
    /// `f ≡ 3 mod 4`; the character of `Q(√-f)`.
    ChiMinusF,
}

/// Residues `a ∈ (Z/f)^×` with `χ(a) = 1`, sorted.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KernelSet {
    pub f: u64,
    pub sign_case: SignCase,
    pub residues: Vec<u64>,
}

impl KernelSet {
    pub fn contains(&self, a: u64) -> bool {
        self.residues.binary_search(&(a % self.f)).is_ok()
    }

    pub fn len(&self) -> usize {
        self.residues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residues.is_empty()
    }

    /// Smallest unit mod `f` outside the kernel.
    pub fn smallest_non_member(&self) -> u64 {
        (2..self.f)
            .find(|&a| gcd(a, self.f) == 1 && !self.contains(a))
            .expect("a quadratic character is nontrivial")
    }
}

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn character_kernel(f: u64) -> Result<KernelSet, QuadraticError> {
    validate_radicand(f)?;
    let (sign_case, disc) = if f % 4 == 1 {
        (SignCase::ChiF, f as i64)
    } else {
        (SignCase::ChiMinusF, -(f as i64))
    };
    let residues = (1..f)
        .filter(|&a| gcd(a, f) == 1 && kronecker(disc, a) == 1)
        .collect();
    Ok(KernelSet {
        f,
        sign_case,
        residues,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gate {
    RunSplit,
    RunNonsplit,
    TriviallyStable,
    Excluded,
}

impl Gate {
    pub fn as_str(&self) -> &'static str {
        match self {
            Gate::RunSplit => "run_split",
            Gate::RunNonsplit => "run_nonsplit",
            Gate::TriviallyStable => "trivially_stable",
            Gate::Excluded => "excluded",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuadFieldInfo {
    pub f: u64,
    pub discriminant: u64,
    pub h: u64,
    pub h_narrow: u64,
    pub unit_norm: i32,
    /// 2-adic valuation of `#A_0`; absent when it is never consumed.
    pub m0: Option<u32>,
    pub split8: bool,
    pub gate: Gate,
}

impl QuadFieldInfo {
    pub fn is_prime_radicand(&self) -> bool {
        is_prime(self.f)
    }
}

pub fn fundamental_discriminant(f: u64) -> u64 {
    if f % 4 == 1 {
        f
    } else {
        4 * f
    }
}

fn isqrt(n: u64) -> u64 {
    let mut x = (n as f64).sqrt() as u64;
    while x * x > n {
        x -= 1;
    }
    while (x + 1) * (x + 1) <= n {
        x += 1;
    }
    x
}

/// `x < √D` for a nonsquare `D`.
fn below_sqrt(x: i64, d: i64) -> bool {
    x < 0 || (x as i128) * (x as i128) < d as i128
}

type Form = (i64, i64, i64);

/// Reduced indefinite forms `(a, b, c)` of discriminant `D`:
/// `0 < b < √D` and `√D - b < 2|a| < √D + b`.
fn reduced_forms(d: i64) -> Vec<Form> {
    let s = isqrt(d as u64) as i64;
    let mut out = Vec::new();
    for b in 1..=s {
        if (b * b - d) % 4 != 0 {
            continue;
        }
        let ac = (b * b - d) / 4; // negative
        let m = -ac;
        for a_abs in 1..=m {
            if m % a_abs != 0 {
                continue;
            }
            let two_a = 2 * a_abs;
            // √D - b < 2|a|  and  2|a| < √D + b
            if !below_sqrt(b + two_a, d) && below_sqrt(two_a - b, d) {
                for a in [a_abs, -a_abs] {
                    out.push((a, b, ac / a));
                }
            }
        }
    }
    out
}

/// One step of the reduction operator on a reduced form.
fn rho((_, b, c): Form, d: i64) -> Form {
    let two_c = 2 * c.abs();
    // b' ≡ -b mod 2|c| with √D - 2|c| < b' < √D
    let s = isqrt(d as u64) as i64;
    let mut bp = (-b).rem_euclid(two_c);
    // largest representative below √D
    bp += ((s - bp).div_euclid(two_c)) * two_c;
    if !below_sqrt(bp, d) {
        bp -= two_c;
    }
    debug_assert!(!below_sqrt(bp + two_c, d));
    (c, bp, (bp * bp - d) / (4 * c))
}

/// Number of cycles of reduced forms, together with whether the principal
/// cycle contains a form with leading coefficient `-1`.
fn form_cycles(d: i64) -> (u64, bool) {
    let forms = reduced_forms(d);
    let mut seen: HashSet<Form> = HashSet::new();
    let mut cycles = 0;
    let mut principal_has_minus_one = false;
    for &start in &forms {
        if seen.contains(&start) {
            continue;
        }
        cycles += 1;
        let mut cur = start;
        let mut members = Vec::new();
        loop {
            seen.insert(cur);
            members.push(cur);
            cur = rho(cur, d);
            if cur == start {
                break;
            }
            assert!(
                members.len() <= forms.len(),
                "reduction cycle did not close"
            );
        }
        if members.iter().any(|f| f.0 == 1) {
            principal_has_minus_one = members.iter().any(|f| f.0 == -1);
        }
    }
    (cycles, principal_has_minus_one)
}

/// Continued-fraction period of `√f` (`f ≡ 3 mod 4`) or `(1+√f)/2`
/// (`f ≡ 1 mod 4`).
pub fn continued_fraction_period(f: u64) -> usize {
    let s = isqrt(f) as i64;
    let d = f as i64;
    let (mut p, mut q) = if f % 4 == 1 { (1i64, 2i64) } else { (0, 1) };
    let mut seen: HashMap<(i64, i64), usize> = HashMap::new();
    let mut i = 0;
    loop {
        if i > 0 {
            if let Some(&j) = seen.get(&(p, q)) {
                return i - j;
            }
            seen.insert((p, q), i);
        }
        let a = (p + s).div_euclid(q);
        p = a * q - p;
        q = (d - p * p) / q;
        i += 1;
    }
}

/// Class number data of `Q(√f)`.
pub fn class_number(f: u64) -> Result<QuadFieldInfo, QuadraticError> {
    validate_radicand(f)?;
    let disc = fundamental_discriminant(f);
    let (h_narrow, _) = form_cycles(disc as i64);
    let period = continued_fraction_period(f);
    let unit_norm = if period % 2 == 1 { -1 } else { 1 };
    let h = if unit_norm == -1 {
        h_narrow
    } else {
        h_narrow / 2
    };
    let mut info = QuadFieldInfo {
        f,
        discriminant: disc,
        h,
        h_narrow,
        unit_norm,
        m0: None,
        split8: f % 8 == 1,
        gate: Gate::Excluded,
    };
    info.gate = classify_gate(&info);
    let v = h.trailing_zeros();
    info.m0 = match (f % 4, info.gate) {
        (_, Gate::TriviallyStable | Gate::Excluded) => None,
        (1, _) => Some(v),
        _ => Some(v - 1),
    };
    Ok(info)
}

/// Narrow class number and whether `-1` is a norm from the principal cycle,
/// computed purely from forms. Exposed for cross-checks.
pub fn narrow_class_number_by_forms(f: u64) -> (u64, bool) {
    form_cycles(fundamental_discriminant(f) as i64)
}

pub fn classify_gate(info: &QuadFieldInfo) -> Gate {
    let f = info.f;
    if validate_radicand(f).is_err() {
        Gate::Excluded
    } else if f % 8 == 1 {
        Gate::RunSplit
    } else if info.h % 2 == 0 {
        Gate::RunNonsplit
    } else {
        Gate::TriviallyStable
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Legendre symbol by Euler's criterion.
    fn legendre(a: i64, p: u64) -> i32 {
        let a = a.rem_euclid(p as i64) as u64;
        if a == 0 {
            return 0;
        }
        let e = crate::finite_field::pow_mod(a, (p - 1) / 2, p);
        if e == 1 {
            1
        } else {
            -1
        }
    }

    /// Jacobi symbol as a product of Legendre symbols over the factorization.
    fn jacobi_oracle(a: i64, mut m: u64) -> i32 {
        let mut out = 1;
        let mut p = 3;
        while m > 1 {
            if p * p > m {
                return out * legendre(a, m);
            }
            while m % p == 0 {
                out *= legendre(a, p);
                m /= p;
            }
            p += 2;
        }
        out
    }

    #[test]
    fn kronecker_examples() {
        assert_eq!(kronecker(-3, 2), -1);
        assert_eq!(kronecker(5, 4), 1);
        assert_eq!(kronecker(949, 7), jacobi_oracle(7, 949));
        assert_eq!(kronecker(949, 7), jacobi_oracle(949, 7));
    }

    #[test]
    fn jacobi_matches_factorization_oracle() {
        for m in (1..400u64).step_by(2) {
            for a in -50..200i64 {
                assert_eq!(jacobi(a, m), jacobi_oracle(a, m), "({a}|{m})");
            }
        }
    }

    #[test]
    fn kronecker_is_periodic_and_multiplicative() {
        for d in [5i64, -3, 8, 12, -4, 949, -7, 13, 21, -15] {
            let period = d.unsigned_abs();
            for a in 1..120u64 {
                assert_eq!(kronecker(d, a), kronecker(d, a + period), "D={d} a={a}");
                for b in 1..20u64 {
                    assert_eq!(kronecker(d, a * b), kronecker(d, a) * kronecker(d, b));
                }
            }
        }
    }

    #[test]
    fn kernel_examples() {
        assert_eq!(character_kernel(3).unwrap().residues, vec![1]);
        assert_eq!(character_kernel(5).unwrap().residues, vec![1, 4]);
        let k = character_kernel(949).unwrap();
        assert_eq!(k.len(), 12 * 72 / 2);
        for a in 1..949 {
            if gcd(a, 949) == 1 {
                assert_eq!(k.contains(a), jacobi_oracle(a as i64, 949) == 1);
            }
        }
    }

    #[test]
    fn kernel_closure_and_minus_one() {
        for f in [3u64, 5, 7, 15, 21, 33, 85, 105, 949, 6817] {
            let k = character_kernel(f).unwrap();
            assert!(k.contains(1));
            for &a in &k.residues {
                for &b in k.residues.iter().take(30) {
                    assert!(k.contains(a * b % f));
                }
            }
            assert_eq!(k.contains(f - 1), f % 4 == 1, "f = {f}");
        }
    }

    #[test]
    fn kernel_is_squares_for_primes_3_mod_4() {
        for f in [3u64, 7, 11, 19, 23, 31, 43, 47, 59, 67, 71, 79, 83] {
            let squares: HashSet<u64> = (1..f).map(|x| x * x % f).collect();
            let k = character_kernel(f).unwrap();
            assert_eq!(k.residues.iter().copied().collect::<HashSet<_>>(), squares);
        }
    }

    #[test]
    fn class_number_examples() {
        let i = class_number(949).unwrap();
        assert_eq!((i.h, i.m0, i.gate), (2, Some(1), Gate::RunNonsplit));
        let i = class_number(6817).unwrap();
        assert_eq!((i.h, i.m0, i.gate), (2, Some(1), Gate::RunSplit));
        assert_eq!(class_number(85).unwrap().h, 2);
        let i = class_number(3).unwrap();
        assert_eq!((i.h, i.h_narrow, i.unit_norm), (1, 2, 1));
        assert_eq!(i.gate, Gate::TriviallyStable);
        let i = class_number(5).unwrap();
        assert_eq!((i.h, i.h_narrow, i.unit_norm), (1, 1, -1));
    }

    #[test]
    fn narrow_relation_holds() {
        for f in (3..600u64).step_by(2).filter(|&f| is_squarefree(f)) {
            let i = class_number(f).unwrap();
            if i.unit_norm == -1 {
                assert_eq!(i.h_narrow, i.h);
            } else {
                assert_eq!(i.h_narrow, 2 * i.h);
            }
        }
    }

    #[test]
    fn rejects_bad_radicands() {
        assert_eq!(validate_radicand(2), Err(QuadraticError::Two));
        assert_eq!(
            validate_radicand(4),
            Err(QuadraticError::Even { f: 4, half: 2 })
        );
        assert_eq!(validate_radicand(9), Err(QuadraticError::NotSquarefree(9)));
        assert_eq!(validate_radicand(1), Err(QuadraticError::TooSmall(1)));
        assert!(character_kernel(45).is_err());
    }
}
