//! Oracles and invariant checks shared by the integration tests and the
//! acceptance harness.

#![allow(dead_code)]

use std::collections::HashSet;
use std::f64::consts::PI;

use greenberg_core::cyclo_logs::{find_split_primes, log_poly_eta, record_from_context};
use greenberg_core::finite_field::{build_field_context, is_prime, pow_mod, prime_factors, Fp2};
use greenberg_core::group_ring::{HowellIdeal, RingSpec};
use greenberg_core::quadratic::character_kernel;

pub fn is_squarefree_odd(f: u64) -> bool {
    if f < 3 || f % 2 == 0 {
        return false;
    }
    let mut m = f;
    let mut p = 3;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += 2;
    }
    true
}

/// Legendre symbol by Euler's criterion.
fn legendre(a: u64, p: u64) -> i32 {
    let a = a % p;
    if a == 0 {
        return 0;
    }
    if pow_mod(a, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Fundamental discriminant of `Q(√f)` and its character, built from
/// Legendre symbols at the prime factors of `f` and `χ_{-4}` when needed.
pub fn discriminant_character(f: u64) -> (u64, impl Fn(u64) -> i32) {
    let primes = prime_factors(f);
    let four = f % 4 == 3;
    let disc = if four { 4 * f } else { f };
    let chi = move |a: u64| -> i32 {
        if a % 2 == 0 && four {
            return 0;
        }
        let mut s = if four {
            if a % 4 == 1 {
                1
            } else {
                -1
            }
        } else {
            1
        };
        for &p in &primes {
            s *= legendre(a, p);
        }
        s
    };
    (disc, chi)
}

/// `(log ε, period)` from the continued fraction of the reduced number
/// `(b + √D)/2`; the product of the complete quotients over one period is
/// the fundamental unit.
pub fn fundamental_unit_log(disc: u64) -> (f64, usize) {
    let sqrt_d = (disc as f64).sqrt();
    let mut b = sqrt_d.floor() as i64;
    while b * b >= disc as i64 {
        b -= 1;
    }
    if (b - disc as i64).rem_euclid(2) != 0 {
        b -= 1;
    }
    let (p0, q0) = (b, 2i64);
    let (mut p, mut q) = (p0, q0);
    let mut log = 0.0;
    let mut period = 0;
    loop {
        let alpha = (p as f64 + sqrt_d) / q as f64;
        log += alpha.ln();
        period += 1;
        let a = alpha.floor() as i64;
        let np = a * q - p;
        let nq = (disc as i64 - np * np) / q;
        p = np;
        q = nq;
        if p == p0 && q == q0 {
            break;
        }
    }
    (log, period)
}

/// Class number from the analytic class number formula, and the norm of the
/// fundamental unit from the period parity.
pub fn analytic_class_number(f: u64) -> (u64, i32) {
    let (disc, chi) = discriminant_character(f);
    let mut sum = 0.0;
    for a in 1..disc {
        let c = chi(a);
        if c != 0 {
            sum += c as f64 * (PI * a as f64 / disc as f64).sin().ln();
        }
    }
    let (log_eps, period) = fundamental_unit_log(disc);
    let h = -sum / (2.0 * log_eps);
    let rounded = h.round();
    assert!((h - rounded).abs() < 1e-6, "f = {f}: analytic h = {h}");
    let norm = if period % 2 == 1 { -1 } else { 1 };
    (rounded as u64, norm)
}

/// Radicands whose kernel has even size, i.e. all but primes `≡ 3 mod 4`.
pub fn rationality_radicands(max: u64) -> Vec<u64> {
    (5..=max)
        .filter(|&f| is_squarefree_odd(f) && !(is_prime(f) && f % 4 == 3))
        .collect()
}

fn prime_at(f: u64, n: u32, pick: usize) -> Result<u64, String> {
    let primes = find_split_primes(f, n, pick + 1).map_err(|e| e.to_string())?;
    Ok(primes[pick])
}

/// Computes all three logs at the `pick`-th split prime; every product is
/// checked for rationality inside.
pub fn check_rationality(f: u64, n: u32, pick: usize) -> Result<(), String> {
    let r = prime_at(f, n, pick)?;
    let kernel = character_kernel(f).map_err(|e| e.to_string())?;
    let ctx = build_field_context(r, n, f).map_err(|e| e.to_string())?;
    let rec = record_from_context(&ctx, &kernel).map_err(|e| format!("f={f} n={n} r={r}: {e}"))?;
    let aug = rec.beta.coeffs.iter().fold(0u64, |s, &c| s.wrapping_add(c)) & ((1 << ctx.k) - 1);
    if aug != 0 {
        return Err(format!("f={f} n={n} r={r}: β augmentation {aug}"));
    }
    Ok(())
}

/// Level-`m` η equals the level-`n` η folded modulo `X^{2^m} - 1`.
pub fn check_norm_compatibility(f: u64, m: u32, n: u32, pick: usize) -> Result<(), String> {
    let r = prime_at(f, n, pick)?;
    let kernel = character_kernel(f).map_err(|e| e.to_string())?;
    let top = build_field_context(r, n, f).map_err(|e| e.to_string())?;
    let low = top.descend(m);
    let eta_n = log_poly_eta(&top, &kernel).map_err(|e| e.to_string())?;
    let eta_m = log_poly_eta(&low, &kernel).map_err(|e| e.to_string())?;
    let mask = (1u64 << top.k) - 1;
    let width = 1usize << m;
    for i in 0..width {
        let folded = (0..1usize << (n - m))
            .map(|j| eta_n.coeffs[i + j * width])
            .fold(0u64, |s, c| s.wrapping_add(c))
            & mask;
        if folded != eta_m.coeffs[i] {
            return Err(format!(
                "f={f} m={m} n={n} r={r}: coefficient {i} is {} but folds to {folded}",
                eta_m.coeffs[i]
            ));
        }
    }
    Ok(())
}

/// Twice the η log equals the log of `prod_{c=±1, a∈K} (1 - z^{c·3^i} ζ^a)`
/// with `z` of order `2^{n+2}` and `ζ` the square of the f-th root used for η.
pub fn check_square_identity(f: u64, n: u32, pick: usize) -> Result<(), String> {
    assert_eq!(f % 4, 1);
    let r = prime_at(f, n, pick)?;
    let kernel = character_kernel(f).map_err(|e| e.to_string())?;
    let ctx = build_field_context(r, n, f).map_err(|e| e.to_string())?;
    let eta = log_poly_eta(&ctx, &kernel).map_err(|e| e.to_string())?;
    let fp = ctx.field();
    let z2 = ctx.ext.mul(ctx.zeta_2n3, ctx.zeta_2n3);
    if z2 != Fp2::from_base(ctx.zeta_2n2) {
        return Err(format!("r={r}: inconsistent roots"));
    }
    let z = ctx.zeta_2n2;
    let order = 1u64 << (n + 2);
    let zf2 = fp.mul(ctx.zeta_f, ctx.zeta_f);
    let mask = (1u64 << ctx.k) - 1;
    let mut three = 1u64;
    for i in 0..1usize << n {
        let zp = fp.pow(z, three);
        let zm = fp.pow(z, order - three);
        let mut prod = 1u64;
        for &a in &kernel.residues {
            let t = fp.pow(zf2, a);
            prod = fp.mul(prod, fp.sub(1, fp.mul(zp, t)));
            prod = fp.mul(prod, fp.sub(1, fp.mul(zm, t)));
        }
        let want = ctx.dlog_two_power(prod).map_err(|e| e.to_string())?;
        if (2 * eta.coeffs[i]) & mask != want {
            return Err(format!("f={f} n={n} r={r}: coefficient {i}"));
        }
        three = three * 3 % order;
    }
    Ok(())
}

/// The ideal generated by `gens`, by brute-force closure under addition and
/// multiplication by `T`.
pub fn enumerate_ideal(spec: &RingSpec, gens: &[Vec<u64>]) -> HashSet<Vec<u64>> {
    let mut shifts = Vec::new();
    for g in gens {
        let mut cur = spec.reduce(g);
        for _ in 0..spec.rank() {
            shifts.push(cur.clone());
            cur = spec.mul_t(&cur);
        }
    }
    let mut set = HashSet::new();
    set.insert(spec.zero());
    let mut frontier = vec![spec.zero()];
    while let Some(x) = frontier.pop() {
        for s in &shifts {
            let y = spec.add(&x, s);
            if set.insert(y.clone()) {
                frontier.push(y);
            }
        }
    }
    set
}

pub fn all_elements(spec: &RingSpec) -> Vec<Vec<u64>> {
    let q = 1u64 << spec.d();
    let rank = spec.rank();
    (0..q.pow(rank as u32))
        .map(|mut idx| {
            (0..rank)
                .map(|_| {
                    let c = idx % q;
                    idx /= q;
                    c
                })
                .collect()
        })
        .collect()
}

/// Compares membership, index and the generator round trip against
/// enumeration.
pub fn check_against_enumeration(spec: &RingSpec, gens: &[Vec<u64>]) -> Result<(), String> {
    let gens: Vec<Vec<u64>> = gens.iter().map(|g| spec.reduce(g)).collect();
    let ideal = HowellIdeal::from_generators(spec.clone(), gens.iter());
    let members = enumerate_ideal(spec, &gens);
    for x in all_elements(spec) {
        if ideal.contains(&x) != members.contains(&x) {
            return Err(format!("membership of {x:?} in ideal of {gens:?}"));
        }
    }
    let total = spec.d() as u64 * spec.rank() as u64;
    if 1u64 << (total - ideal.index_log2()) != members.len() as u64 {
        return Err(format!("index of ideal of {gens:?}"));
    }
    let rep = ideal.canonical_generators().map_err(|e| e.to_string())?;
    if rep.to_ideal() != ideal {
        return Err(format!("generator round trip for {gens:?}"));
    }
    Ok(())
}

/// Z/4 rings of rank at most 4, full and divided.
pub fn small_specs() -> Vec<RingSpec> {
    vec![
        RingSpec::full(0, 2),
        RingSpec::full(1, 2),
        RingSpec::full(2, 2),
        RingSpec::divided(1, 2),
        RingSpec::divided(2, 2),
    ]
}
