//! Arithmetic in `F_r` and `F_{r^2}` for odd primes `r < 2^63`.
//!
//! Residues are `u64` values in `[0, r)`; every product goes through a 128-bit
//! intermediate. The quadratic extension is presented as `F_r(√q)` with `q`
//! the smallest positive quadratic nonresidue, which makes every context
//! built from the same prime reproducible.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FieldError {
    #[error("{r} is not an odd prime")]
    NotPrime { r: u64 },
    #[error("{r} is not congruent to 1 modulo {modulus}")]
    BadCongruence { r: u64, modulus: u64 },
    #[error("f = {f} must be odd, squarefree and at least 3")]
    BadRadicand { f: u64 },
    #[error("no generator of order {order} found among {tried} candidates for r = {r}")]
    NoGenerator { r: u64, order: u64, tried: u64 },
    #[error("discrete logarithm of zero")]
    LogOfZero,
    #[error("{value} is not a 2^{k}-th power class reachable from the chosen root of unity")]
    NotInSubgroup { value: u64, k: u32 },
}

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, m: u64) -> u64 {
    let s = a as u128 + b as u128;
    if s >= m as u128 {
        (s - m as u128) as u64
    } else {
        s as u64
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, m: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        m - (b - a)
    }
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin. The first twelve primes are a witness set
/// that is exact for every integer below 3.3·10^24, so in particular for
/// all of `u64`.
pub fn is_prime(m: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if m < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if m % p == 0 {
            return m == p;
        }
    }
    let s = (m - 1).trailing_zeros();
    let d = (m - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, m);
        if x == 1 || x == m - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, m);
            if x == m - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Distinct prime divisors of `m` (trial division; `m` is small here).
pub fn prime_factors(mut m: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= m {
        if m % p == 0 {
            out.push(p);
            while m % p == 0 {
                m /= p;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if m > 1 {
        out.push(m);
    }
    out
}

pub fn is_squarefree(m: u64) -> bool {
    if m == 0 {
        return false;
    }
    let mut rest = m;
    for p in prime_factors(m) {
        rest /= p;
        if rest % p == 0 {
            return false;
        }
    }
    true
}

/// The prime field `F_r`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PrimeField {
    r: u64,
}

impl PrimeField {
    pub fn new(r: u64) -> Result<Self, FieldError> {
        if r == 2 || !is_prime(r) || r >= 1 << 63 {
            return Err(FieldError::NotPrime { r });
        }
        Ok(Self { r })
    }

    #[inline]
    pub fn modulus(&self) -> u64 {
        self.r
    }

    #[inline]
    pub fn mul(&self, a: u64, b: u64) -> u64 {
        mul_mod(a, b, self.r)
    }

    #[inline]
    pub fn add(&self, a: u64, b: u64) -> u64 {
        add_mod(a, b, self.r)
    }

    #[inline]
    pub fn sub(&self, a: u64, b: u64) -> u64 {
        sub_mod(a, b, self.r)
    }

    #[inline]
    pub fn neg(&self, a: u64) -> u64 {
        if a == 0 {
            0
        } else {
            self.r - a
        }
    }

    pub fn pow(&self, a: u64, e: u64) -> u64 {
        pow_mod(a, e, self.r)
    }

    /// Inverse by Fermat; `a` must be nonzero.
    pub fn inv(&self, a: u64) -> u64 {
        debug_assert!(a % self.r != 0);
        self.pow(a, self.r - 2)
    }

    pub fn is_square(&self, a: u64) -> bool {
        a % self.r == 0 || self.pow(a, (self.r - 1) / 2) == 1
    }

    pub fn smallest_nonresidue(&self) -> u64 {
        (2..)
            .find(|&q| !self.is_square(q))
            .expect("nonresidues exist")
    }
}

/// An element `a + b·√q` of `F_{r^2}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fp2 {
    pub a: u64,
    pub b: u64,
}

impl Fp2 {
    pub const ZERO: Fp2 = Fp2 { a: 0, b: 0 };
    pub const ONE: Fp2 = Fp2 { a: 1, b: 0 };

    pub fn from_base(a: u64) -> Self {
        Fp2 { a, b: 0 }
    }

    pub fn is_zero(&self) -> bool {
        self.a == 0 && self.b == 0
    }

    /// True when the element lies in the prime field.
    pub fn is_rational(&self) -> bool {
        self.b == 0
    }
}

impl fmt::Display for Fp2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} + {}·√q", self.a, self.b)
    }
}

/// `F_{r^2} = F_r[√q]`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadraticExtension {
    base: PrimeField,
    q: u64,
}

impl QuadraticExtension {
    pub fn new(base: PrimeField) -> Self {
        let q = base.smallest_nonresidue();
        Self { base, q }
    }

    pub fn base(&self) -> &PrimeField {
        &self.base
    }

    pub fn nonresidue(&self) -> u64 {
        self.q
    }

    #[inline]
    pub fn add(&self, x: Fp2, y: Fp2) -> Fp2 {
        let f = &self.base;
        Fp2 {
            a: f.add(x.a, y.a),
            b: f.add(x.b, y.b),
        }
    }

    #[inline]
    pub fn sub(&self, x: Fp2, y: Fp2) -> Fp2 {
        let f = &self.base;
        Fp2 {
            a: f.sub(x.a, y.a),
            b: f.sub(x.b, y.b),
        }
    }

    #[inline]
    pub fn neg(&self, x: Fp2) -> Fp2 {
        Fp2 {
            a: self.base.neg(x.a),
            b: self.base.neg(x.b),
        }
    }

    #[inline]
    pub fn mul(&self, x: Fp2, y: Fp2) -> Fp2 {
        let r = self.base.modulus() as u128;
        let a =
            (x.a as u128 * y.a as u128 % r + (x.b as u128 * y.b as u128 % r) * self.q as u128) % r;
        let b = (x.a as u128 * y.b as u128 + x.b as u128 * y.a as u128) % r;
        Fp2 {
            a: a as u64,
            b: b as u64,
        }
    }

    /// Multiplication by an element of the prime field.
    #[inline]
    pub fn scale(&self, x: Fp2, s: u64) -> Fp2 {
        Fp2 {
            a: self.base.mul(x.a, s),
            b: self.base.mul(x.b, s),
        }
    }

    pub fn pow(&self, mut x: Fp2, mut e: u128) -> Fp2 {
        let mut acc = Fp2::ONE;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, x);
            }
            x = self.mul(x, x);
            e >>= 1;
        }
        acc
    }

    /// Frobenius `x ↦ x^r`, i.e. conjugation `√q ↦ -√q`.
    pub fn frobenius(&self, x: Fp2) -> Fp2 {
        Fp2 {
            a: x.a,
            b: self.base.neg(x.b),
        }
    }

    /// Norm down to `F_r`: `a^2 - q b^2`.
    pub fn norm(&self, x: Fp2) -> u64 {
        let f = &self.base;
        f.sub(f.mul(x.a, x.a), f.mul(self.q, f.mul(x.b, x.b)))
    }

    pub fn inv(&self, x: Fp2) -> Fp2 {
        let n = self.norm(x);
        let ninv = self.base.inv(n);
        self.scale(self.frobenius(x), ninv)
    }

    /// `(r^2 - 1)` as a 128-bit integer.
    pub fn group_order(&self) -> u128 {
        let r = self.base.modulus() as u128;
        r * r - 1
    }
}

/// Which element of exact order `2^{n+3} f` a context uses. The default is
/// the first success of the sweep `y = a + √q`, `a = 0, 1, 2, …`; `Nth(j)`
/// skips the first `j` successes, giving an alternative embedding.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum ZetaChoice {
    #[default]
    First,
    Nth(u32),
}

impl ZetaChoice {
    fn skip(self) -> u32 {
        match self {
            ZetaChoice::First => 0,
            ZetaChoice::Nth(j) => j,
        }
    }
}

/// A split prime `r` together with the roots of unity used to evaluate
/// cyclotomic units at level `n`, and the `2^k`-th root used for logs.
#[derive(Clone, Debug)]
pub struct FieldContext {
    pub r: u64,
    pub n: u32,
    pub f: u64,
    /// Log precision, always `n + 1`.
    pub k: u32,
    pub ext: QuadraticExtension,
    /// Exact order `2^{n+3} f`.
    pub zeta: Fp2,
    /// `zeta^{2^{n+1} f}`, a fourth root of unity (lies in `F_r`).
    pub zeta4: u64,
    /// `zeta^f`, order `2^{n+3}`; in general outside `F_r`.
    pub zeta_2n3: Fp2,
    /// `zeta^{2f}`, order `2^{n+2}` (lies in `F_r`).
    pub zeta_2n2: u64,
    /// `zeta^{2^{n+3}}`, order `f` (lies in `F_r`).
    pub zeta_f: u64,
    /// `zeta^{2^{n+3} f / 2^k}`, order `2^k` (lies in `F_r`).
    pub zeta_2k: u64,
    /// `zeta_2k^{2^j}` for `j < k`, used by the bit-by-bit logarithm.
    zeta_2k_inv_powers: Vec<u64>,
}

impl FieldContext {
    pub fn field(&self) -> &PrimeField {
        self.ext.base()
    }

    /// Order of `zeta`, `2^{n+3} f`.
    pub fn root_order(&self) -> u64 {
        (1u64 << (self.n + 3)) * self.f
    }

    /// Verifies `zeta^{N} = 1` and `zeta^{N/p} ≠ 1` for every prime `p | 2f`.
    pub fn certify_order(&self) -> bool {
        let order = self.root_order() as u128;
        if self.ext.pow(self.zeta, order) != Fp2::ONE {
            return false;
        }
        let mut primes = prime_factors(self.f);
        primes.push(2);
        primes
            .iter()
            .all(|&p| self.ext.pow(self.zeta, order / p as u128) != Fp2::ONE)
    }

    /// The context at a lower level `m` whose roots of order `2^{m+3}` and
    /// `f` are the `2^{n-m}`-th powers of this context's, keeping this
    /// context's log precision and `2^k`-th root.
    pub fn descend(&self, m: u32) -> FieldContext {
        assert!(m <= self.n, "can only descend");
        let shift = self.n - m;
        let two_part = 1u64 << (m + 3);
        // u ≡ 1 mod 2^{m+3}, u ≡ 2^{n-m} mod f
        let target = (1u64 << shift) % self.f;
        let u = (0..self.f)
            .map(|t| 1 + two_part * t)
            .find(|u| u % self.f == target)
            .expect("2^{m+3} is invertible mod f");
        let zeta = self.ext.pow(self.zeta, (1u128 << shift) * u as u128);
        let zeta_2k = Fp2::from_base(self.zeta_2k);
        context_from_root(self.r, m, self.f, self.k, self.ext, zeta, zeta_2k)
    }

    /// The element of `Z/2^k` with `u^{(r-1)/2^k} = zeta_2k^e`.
    pub fn dlog_two_power(&self, u: u64) -> Result<u64, FieldError> {
        let fp = self.field();
        let u = u % fp.modulus();
        if u == 0 {
            return Err(FieldError::LogOfZero);
        }
        let k = self.k;
        let mut h = fp.pow(u, (fp.modulus() - 1) >> k);
        // h = zeta_2k^e; peel bits from the bottom.
        let mut e = 0u64;
        for j in 0..k {
            let probe = fp.pow(h, 1u64 << (k - 1 - j));
            if probe != 1 {
                e |= 1 << j;
                h = fp.mul(h, self.zeta_2k_inv_powers[j as usize]);
            }
        }
        if h != 1 {
            return Err(FieldError::NotInSubgroup { value: u, k });
        }
        Ok(e)
    }
}

/// Builds the context for the prime `r` at level `n` for the radicand `f`.
pub fn build_field_context(r: u64, n: u32, f: u64) -> Result<FieldContext, FieldError> {
    build_field_context_with(r, n, f, ZetaChoice::First)
}

pub fn build_field_context_with(
    r: u64,
    n: u32,
    f: u64,
    choice: ZetaChoice,
) -> Result<FieldContext, FieldError> {
    if f < 3 || f % 2 == 0 || !is_squarefree(f) {
        return Err(FieldError::BadRadicand { f });
    }
    let base = PrimeField::new(r)?;
    let split_modulus = (1u64 << (n + 2)) * f;
    if r % split_modulus != 1 {
        return Err(FieldError::BadCongruence {
            r,
            modulus: split_modulus,
        });
    }
    let ext = QuadraticExtension::new(base);
    let order = (1u64 << (n + 3)) * f;
    let cofactor = ext.group_order() / order as u128;
    let mut primes = prime_factors(f);
    primes.push(2);

    let mut skip = choice.skip();
    let mut zeta = None;
    let mut tried = 0;
    for a in 0..r.min(1 << 20) {
        tried += 1;
        let y = Fp2 { a, b: 1 };
        let z = ext.pow(y, cofactor);
        let exact = primes
            .iter()
            .all(|&p| ext.pow(z, (order / p) as u128) != Fp2::ONE);
        if exact {
            if skip == 0 {
                zeta = Some(z);
                break;
            }
            skip -= 1;
        }
    }
    let zeta = zeta.ok_or(FieldError::NoGenerator { r, order, tried })?;

    let zeta_2k = ext.pow(zeta, (order >> (n + 1)) as u128);
    Ok(context_from_root(r, n, f, n + 1, ext, zeta, zeta_2k))
}

fn context_from_root(
    r: u64,
    n: u32,
    f: u64,
    k: u32,
    ext: QuadraticExtension,
    zeta: Fp2,
    zeta_2k: Fp2,
) -> FieldContext {
    let zeta4 = ext.pow(zeta, ((1u64 << (n + 1)) * f) as u128);
    let zeta_2n3 = ext.pow(zeta, f as u128);
    let zeta_2n2 = ext.pow(zeta, (2 * f) as u128);
    let zeta_f = ext.pow(zeta, (1u64 << (n + 3)) as u128);
    for x in [zeta4, zeta_2n2, zeta_f, zeta_2k] {
        assert!(x.is_rational(), "root of order dividing r-1 left F_r");
    }
    let base = *ext.base();
    let inv = base.inv(zeta_2k.a);
    let mut zeta_2k_inv_powers = Vec::with_capacity(k as usize);
    let mut acc = inv;
    for _ in 0..k {
        zeta_2k_inv_powers.push(acc);
        acc = base.mul(acc, acc);
    }
    FieldContext {
        r,
        n,
        f,
        k,
        ext,
        zeta,
        zeta4: zeta4.a,
        zeta_2n3,
        zeta_2n2: zeta_2n2.a,
        zeta_f: zeta_f.a,
        zeta_2k: zeta_2k.a,
        zeta_2k_inv_powers,
    }
}
