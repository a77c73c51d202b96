//! Split-prime search and the log-polynomials of the cyclotomic units
//! `η_n`, `β_n` and `δ'_f` at one auxiliary prime.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::finite_field::{
    build_field_context_with, is_prime, FieldContext, FieldError, Fp2, ZetaChoice,
};
use crate::quadratic::{KernelSet, SignCase};

/// Default bound on `t` in the sweep `r = 1 + t·2^{n+2}f`.
pub const PRIME_SWEEP_CAP: u64 = 10_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum CycloError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("{unit} product at r = {r}, coefficient {index} is not in F_r")]
    LeftBaseField {
        r: u64,
        unit: &'static str,
        index: usize,
    },
    #[error("{unit} product at r = {r} has a zero factor")]
    ZeroFactor { r: u64, unit: &'static str },
    #[error("kernel is for f = {kernel_f}, context for f = {ctx_f}")]
    KernelMismatch { kernel_f: u64, ctx_f: u64 },
    #[error("δ' is only defined for f ≡ 1 mod 8, got f = {0}")]
    NotSplitAtTwo(u64),
    #[error("no prime r ≡ 1 mod {modulus} found with t ≤ {cap}")]
    SearchExhausted { modulus: u64, cap: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    /// Coefficients of `X^i`.
    X,
    /// Coefficients of `T^i`, `T = X - 1`.
    T,
}

/// An element of `Z/2^k[X]/(X^{2^n} - 1)` as a coefficient list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LogPoly {
    pub n: u32,
    pub k: u32,
    pub coeffs: Vec<u64>,
    pub basis: Basis,
}

impl LogPoly {
    pub fn new(n: u32, k: u32, coeffs: Vec<u64>, basis: Basis) -> Self {
        assert_eq!(coeffs.len(), 1 << n);
        let mask = (1u64 << k) - 1;
        let coeffs = coeffs.into_iter().map(|c| c & mask).collect();
        LogPoly {
            n,
            k,
            coeffs,
            basis,
        }
    }

    fn mask(&self) -> u64 {
        (1u64 << self.k) - 1
    }

    /// Rewrites in powers of `T = X - 1` (a Taylor shift by 1).
    pub fn to_t(&self) -> LogPoly {
        if self.basis == Basis::T {
            return self.clone();
        }
        let mut c = self.coeffs.clone();
        let len = c.len();
        let mask = self.mask();
        for i in 0..len {
            for j in (i..len - 1).rev() {
                c[j] = (c[j] + c[j + 1]) & mask;
            }
        }
        LogPoly {
            coeffs: c,
            basis: Basis::T,
            ..*self
        }
    }

    pub fn to_x(&self) -> LogPoly {
        if self.basis == Basis::X {
            return self.clone();
        }
        let mut c = self.coeffs.clone();
        let len = c.len();
        let mask = self.mask();
        for i in (0..len).rev() {
            for j in i..len - 1 {
                c[j] = c[j].wrapping_sub(c[j + 1]) & mask;
            }
        }
        LogPoly {
            coeffs: c,
            basis: Basis::X,
            ..*self
        }
    }

    /// Value at `X = 1`.
    pub fn augmentation(&self) -> u64 {
        match self.basis {
            Basis::X => self.coeffs.iter().fold(0u64, |a, &c| a.wrapping_add(c)) & self.mask(),
            Basis::T => self.coeffs[0],
        }
    }
}

/// Logs of the three units at one prime, in the `X`-basis.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimeLogRecord {
    pub r: u64,
    pub eta: LogPoly,
    pub beta: LogPoly,
    /// `c` with `f_r(δ'_f) = c·N_n`; present only when `f ≡ 1 mod 8`.
    pub delta: Option<u64>,
}

/// The first `count` primes `r ≡ 1 mod 2^{n+2}f`.
pub fn find_split_primes(f: u64, n: u32, count: usize) -> Result<Vec<u64>, CycloError> {
    find_split_primes_capped(f, n, count, PRIME_SWEEP_CAP)
}

pub fn find_split_primes_capped(
    f: u64,
    n: u32,
    count: usize,
    cap: u64,
) -> Result<Vec<u64>, CycloError> {
    let modulus = (1u64 << (n + 2)) * f;
    let mut out = Vec::with_capacity(count);
    let mut t = 0;
    while out.len() < count {
        t += 1;
        if t > cap {
            return Err(CycloError::SearchExhausted { modulus, cap });
        }
        let r = 1 + t * modulus;
        if is_prime(r) {
            out.push(r);
        }
    }
    Ok(out)
}

/// Powers `base^0, …, base^{len-1}` in `F_r`.
fn powers(ctx: &FieldContext, base: u64, len: usize) -> Vec<u64> {
    let fp = ctx.field();
    let mut out = Vec::with_capacity(len);
    let mut acc = 1;
    for _ in 0..len {
        out.push(acc);
        acc = fp.mul(acc, base);
    }
    out
}

fn powers2(ctx: &FieldContext, base: Fp2, len: usize) -> Vec<Fp2> {
    let mut out = Vec::with_capacity(len);
    let mut acc = Fp2::ONE;
    for _ in 0..len {
        out.push(acc);
        acc = ctx.ext.mul(acc, base);
    }
    out
}

/// `3^i mod 2^bits` for `i < count`.
fn powers_of_three(count: usize, bits: u32) -> Vec<u64> {
    let mask = (1u64 << bits) - 1;
    let mut out = Vec::with_capacity(count);
    let mut acc = 1u64;
    for _ in 0..count {
        out.push(acc);
        acc = (acc * 3) & mask;
    }
    out
}

fn check_kernel(ctx: &FieldContext, kernel: &KernelSet) -> Result<(), CycloError> {
    let wanted = if ctx.f % 4 == 1 {
        SignCase::ChiF
    } else {
        SignCase::ChiMinusF
    };
    if kernel.f != ctx.f || kernel.sign_case != wanted {
        return Err(CycloError::KernelMismatch {
            kernel_f: kernel.f,
            ctx_f: ctx.f,
        });
    }
    Ok(())
}

/// Log-polynomial of `η_n`: coefficient `i` is the log of
/// `prod_{a ∈ K} ζ_4^{3^i} (w ζ_f^a - w^{-1} ζ_f^{-a})` with `w = ζ_{2^{n+3}}^{3^i}`.
pub fn log_poly_eta(ctx: &FieldContext, kernel: &KernelSet) -> Result<LogPoly, CycloError> {
    check_kernel(ctx, kernel)?;
    let n = ctx.n;
    let len = 1usize << n;
    let ext = &ctx.ext;
    let root_order = 1usize << (n + 3);
    let w_pows = powers2(ctx, ctx.zeta_2n3, root_order);
    let zf = powers(ctx, ctx.zeta_f, ctx.f as usize);
    let z4 = powers(ctx, ctx.zeta4, 4);
    let threes = powers_of_three(len, n + 3);
    let ksize = kernel.len() as u64;
    let mut coeffs = Vec::with_capacity(len);
    for (i, &e) in threes.iter().enumerate() {
        let e = e as usize;
        let w = w_pows[e];
        let w_inv = w_pows[(root_order - e) % root_order];
        let mut prod = Fp2::from_base(z4[((e as u64 * ksize) % 4) as usize]);
        for &a in &kernel.residues {
            let a = a as usize;
            let plus = ext.scale(w, zf[a]);
            let minus = ext.scale(w_inv, zf[(ctx.f as usize - a) % ctx.f as usize]);
            let factor = ext.sub(plus, minus);
            if factor.is_zero() {
                return Err(CycloError::ZeroFactor {
                    r: ctx.r,
                    unit: "eta",
                });
            }
            prod = ext.mul(prod, factor);
        }
        if !prod.is_rational() {
            return Err(CycloError::LeftBaseField {
                r: ctx.r,
                unit: "eta",
                index: i,
            });
        }
        coeffs.push(ctx.dlog_two_power(prod.a)?);
    }
    Ok(LogPoly::new(n, ctx.k, coeffs, Basis::X))
}

/// Log-polynomial of `β_n`: coefficient `i` is the log of
/// `z^{-3^i} (1 - z^{3^{i+1}}) / (1 - z^{3^i})` with `z = ζ_{2^{n+2}}`.
pub fn log_poly_beta(ctx: &FieldContext) -> Result<LogPoly, CycloError> {
    let n = ctx.n;
    let len = 1usize << n;
    let fp = ctx.field();
    let order = 1usize << (n + 2);
    let z = powers(ctx, ctx.zeta_2n2, order);
    let threes = powers_of_three(len + 1, n + 2);
    let mut coeffs = Vec::with_capacity(len);
    for i in 0..len {
        let e = threes[i] as usize;
        let e_next = threes[i + 1] as usize;
        let num = fp.sub(1, z[e_next]);
        let den = fp.sub(1, z[e]);
        if num == 0 || den == 0 {
            return Err(CycloError::ZeroFactor {
                r: ctx.r,
                unit: "beta",
            });
        }
        // (3^i - 3^{i+1}) / 2 = -3^i
        let u = fp.mul(fp.mul(z[(order - e) % order], num), fp.inv(den));
        coeffs.push(ctx.dlog_two_power(u)?);
    }
    Ok(LogPoly::new(n, ctx.k, coeffs, Basis::X))
}

/// The scalar `c` with `f_r(δ'_f) = c·(1 + X + … + X^{2^n - 1})`.
pub fn log_scalar_delta(
    ctx: &FieldContext,
    kernel: &KernelSet,
    f_prime: bool,
) -> Result<u64, CycloError> {
    check_kernel(ctx, kernel)?;
    let f = ctx.f;
    if f % 8 != 1 {
        return Err(CycloError::NotSplitAtTwo(f));
    }
    let fp = ctx.field();
    let zf = powers(ctx, ctx.zeta_f, f as usize);
    let mut num = 1u64;
    let mut den = 1u64;
    if f_prime {
        let s = kernel.smallest_non_member();
        let inv2 = f.div_ceil(2);
        for &a in kernel.residues.iter().filter(|&&a| a <= (f - 1) / 2) {
            let twist = a * (s - 1) % f * inv2 % f;
            num = fp.mul(num, fp.mul(zf[twist as usize], fp.sub(1, zf[a as usize])));
            den = fp.mul(den, fp.sub(1, zf[(a * s % f) as usize]));
        }
    } else {
        for &a in &kernel.residues {
            num = fp.mul(num, fp.sub(1, zf[a as usize]));
        }
    }
    if num == 0 || den == 0 {
        return Err(CycloError::ZeroFactor {
            r: ctx.r,
            unit: "delta",
        });
    }
    Ok(ctx.dlog_two_power(fp.mul(num, fp.inv(den)))?)
}

/// All three logs at one prime from a prepared context.
pub fn record_from_context(
    ctx: &FieldContext,
    kernel: &KernelSet,
) -> Result<PrimeLogRecord, CycloError> {
    let eta = log_poly_eta(ctx, kernel)?;
    let beta = log_poly_beta(ctx)?;
    let delta = if ctx.f % 8 == 1 {
        Some(log_scalar_delta(ctx, kernel, is_prime(ctx.f))?)
    } else {
        None
    };
    Ok(PrimeLogRecord {
        r: ctx.r,
        eta,
        beta,
        delta,
    })
}

pub fn compute_record(
    r: u64,
    n: u32,
    kernel: &KernelSet,
    choice: ZetaChoice,
) -> Result<PrimeLogRecord, CycloError> {
    let ctx = build_field_context_with(r, n, kernel.f, choice)?;
    record_from_context(&ctx, kernel)
}

/// Records for several primes, computed in parallel and returned in the
/// order of `primes`.
pub fn compute_records(
    primes: &[u64],
    n: u32,
    kernel: &KernelSet,
    choice: ZetaChoice,
) -> Result<Vec<PrimeLogRecord>, CycloError> {
    primes
        .par_iter()
        .map(|&r| compute_record(r, n, kernel, choice))
        .collect()
}
