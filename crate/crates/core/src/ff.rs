//! Prime fields `F_p` and extension fields `F_{p^e}`.
//!
//! Residues are stored as `u128`, which covers every modulus up to the
//! default protocol prime `2^127 - 1`. Multiplication dispatches on the
//! modulus shape: Mersenne primes get a fold-based reduction, moduli below
//! `2^64` use the double-width product directly, and anything else falls back
//! to a shift-and-add ladder. Extension elements are dense little-endian
//! coefficient vectors reduced modulo a monic irreducible; there are no
//! precomputed multiplication tables.
//!
//! Field descriptors and elements are immutable once constructed and can be
//! shared freely across threads. This is simulation-grade arithmetic: exact,
//! but not constant-time.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

/// Smallest prime admitted for protocol use without the `small_field_ok` gate.
pub const PROTOCOL_PRIME_FLOOR: u128 = 100_000_000_000_000_000_000; // 10^20

/// Default protocol prime, the Mersenne prime `2^127 - 1`.
pub const DEFAULT_PROTOCOL_PRIME: u128 = (1u128 << 127) - 1;

/// Fast-test prime, the Mersenne prime `2^61 - 1`. Below the protocol floor,
/// so it must be constructed with `small_field_ok`.
pub const FAST_TEST_PRIME: u128 = (1u128 << 61) - 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FfError {
    #[error("zero has no multiplicative inverse")]
    DivisionByZero,
    #[error("operands belong to different fields")]
    FieldMismatch,
    #[error("{0} is not prime")]
    NotPrime(u128),
    #[error("prime {0} is below the protocol floor of 10^20; pass small_field_ok to allow it")]
    FieldTooSmall(u128),
    #[error("characteristic-2 fields are not supported")]
    EvenCharacteristic,
    #[error("modulus is not a monic irreducible of the requested degree")]
    NotIrreducible,
    #[error("no irreducible modulus found within {0} attempts")]
    IrreducibleSearchFailed(usize),
    #[error("coefficient {0} is not a reduced residue modulo {1}")]
    CoefficientOutOfRange(u128, u128),
    #[error("coefficient vector has length {got}, field degree is {want}")]
    WrongCoefficientCount { got: usize, want: usize },
    #[error("extension degree must be at least 1")]
    ZeroDegree,
}

// ---------------------------------------------------------------------------
// Prime field
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Reducer {
    /// p < 2^64: the double-width product fits in u128.
    Narrow,
    /// p = 2^61 - 1.
    Mersenne61,
    /// p = 2^127 - 1.
    Mersenne127,
    /// 2^64 <= p < 2^127, reduction by shift-and-add.
    Wide,
}

/// The prime field `F_p`.
///
/// Construction verifies primality (Miller–Rabin) and, unless the
/// `small_field_ok` constructor is used, the `p >= 10^20` floor required for
/// the degree test's security margin.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PrimeField {
    p: u128,
    reducer: Reducer,
}

impl PrimeField {
    /// Field for protocol use: `p` must be prime and at least `10^20`.
    pub fn new(p: u128) -> Result<Self, FfError> {
        if p < PROTOCOL_PRIME_FLOOR {
            return Err(FfError::FieldTooSmall(p));
        }
        Self::small_field_ok(p)
    }

    /// Field for tests and desk-scale experiments: any odd prime is accepted.
    pub fn small_field_ok(p: u128) -> Result<Self, FfError> {
        if p == 2 {
            return Err(FfError::EvenCharacteristic);
        }
        if !is_prime(p) {
            return Err(FfError::NotPrime(p));
        }
        let reducer = if p == FAST_TEST_PRIME {
            Reducer::Mersenne61
        } else if p == DEFAULT_PROTOCOL_PRIME {
            Reducer::Mersenne127
        } else if p < (1u128 << 64) {
            Reducer::Narrow
        } else {
            Reducer::Wide
        };
        Ok(PrimeField { p, reducer })
    }

    #[inline]
    pub fn modulus(&self) -> u128 {
        self.p
    }

    #[inline]
    pub fn add(&self, a: u128, b: u128) -> u128 {
        let s = a + b;
        if s >= self.p {
            s - self.p
        } else {
            s
        }
    }

    #[inline]
    pub fn sub(&self, a: u128, b: u128) -> u128 {
        if a >= b {
            a - b
        } else {
            a + self.p - b
        }
    }

    #[inline]
    pub fn neg(&self, a: u128) -> u128 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u128, b: u128) -> u128 {
        match self.reducer {
            Reducer::Narrow => (a * b) % self.p,
            Reducer::Mersenne61 => mul_mersenne61(a, b),
            Reducer::Mersenne127 => mul_mersenne127(a, b),
            Reducer::Wide => mul_wide(a, b, self.p),
        }
    }

    /// Square-and-multiply with an arbitrary 128-bit exponent.
    pub fn pow(&self, mut base: u128, mut exp: u128) -> u128 {
        let mut acc = 1u128;
        while exp != 0 {
            if exp & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            exp >>= 1;
        }
        acc
    }

    /// Multiplicative inverse by Fermat's little theorem.
    pub fn inv(&self, a: u128) -> Result<u128, FfError> {
        if a == 0 {
            return Err(FfError::DivisionByZero);
        }
        Ok(self.pow(a, self.p - 2))
    }

    /// Uniform residue in `[0, p)`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u128 {
        let bits = 128 - self.p.leading_zeros();
        let mask = if bits >= 128 {
            u128::MAX
        } else {
            (1u128 << bits) - 1
        };
        loop {
            let candidate = rng.gen::<u128>() & mask;
            if candidate < self.p {
                return candidate;
            }
        }
    }
}

#[inline]
fn mul_mersenne61(a: u128, b: u128) -> u128 {
    const M: u128 = (1u128 << 61) - 1;
    let prod = a * b; // both < 2^61, product < 2^122
    let folded = (prod & M) + (prod >> 61);
    let folded = (folded & M) + (folded >> 61);
    if folded >= M {
        folded - M
    } else {
        folded
    }
}

#[inline]
fn mul_mersenne127(a: u128, b: u128) -> u128 {
    const M: u128 = (1u128 << 127) - 1;
    let (a_hi, a_lo) = ((a >> 64) as u64, a as u64);
    let (b_hi, b_lo) = ((b >> 64) as u64, b as u64);
    let p0 = a_lo as u128 * b_lo as u128;
    let p1 = a_lo as u128 * b_hi as u128;
    let p2 = a_hi as u128 * b_lo as u128;
    let p3 = a_hi as u128 * b_hi as u128;
    // a, b < 2^127 so a_hi, b_hi < 2^63 and p1 + p2 cannot overflow.
    let mid = p1 + p2;
    let (lo, carry) = p0.overflowing_add(mid << 64);
    let hi = p3 + (mid >> 64) + carry as u128;
    // hi * 2^128 + lo == hi * 2 + lo (mod 2^127 - 1)
    let t = (lo & M) + (lo >> 127) + 2 * hi;
    let t = (t & M) + (t >> 127);
    if t >= M {
        t - M
    } else {
        t
    }
}

fn mul_wide(mut a: u128, mut b: u128, p: u128) -> u128 {
    let mut acc = 0u128;
    while b != 0 {
        if b & 1 == 1 {
            acc = if acc + a >= p || acc.checked_add(a).is_none() {
                acc.wrapping_add(a).wrapping_sub(p)
            } else {
                acc + a
            };
        }
        b >>= 1;
        if b != 0 {
            a = if a + a >= p || a.checked_add(a).is_none() {
                a.wrapping_add(a).wrapping_sub(p)
            } else {
                a + a
            };
        }
    }
    acc
}

/// Miller–Rabin primality test: deterministic witness set below 2^64,
/// 40 pseudo-random witnesses above it.
pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    let d = n - 1;
    let s = d.trailing_zeros();
    let d = d >> s;
    let mulmod: fn(u128, u128, u128) -> u128 = |a, b, m| {
        if m < (1u128 << 64) {
            (a * b) % m
        } else if m == DEFAULT_PROTOCOL_PRIME {
            mul_mersenne127(a, b)
        } else {
            mul_wide(a, b, m)
        }
    };
    let powmod = |mut base: u128, mut exp: u128, m: u128| {
        let mut acc = 1u128;
        base %= m;
        while exp != 0 {
            if exp & 1 == 1 {
                acc = mulmod(acc, base, m);
            }
            base = mulmod(base, base, m);
            exp >>= 1;
        }
        acc
    };
    let witness_passes = |a: u128| {
        let a = a % n;
        if a == 0 {
            return true;
        }
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            return true;
        }
        for _ in 1..s {
            x = mulmod(x, x, n);
            if x == n - 1 {
                return true;
            }
        }
        false
    };
    if n < (1u128 << 64) {
        [2u128, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37]
            .iter()
            .all(|&a| witness_passes(a))
    } else {
        // Pseudo-random witnesses derived from n itself, splitmix64-style.
        let mut state = (n as u64) ^ ((n >> 64) as u64) ^ 0x9E37_79B9_7F4A_7C15;
        (0..40).all(|_| {
            state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
            let mut z = state;
            z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
            z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
            z ^= z >> 31;
            witness_passes(2 + z as u128)
        })
    }
}

// ---------------------------------------------------------------------------
// Extension field
// ---------------------------------------------------------------------------

#[derive(Debug)]
struct ExtFieldInner {
    base: PrimeField,
    degree: usize,
    /// Monic irreducible, little-endian, length `degree + 1`. Degree 1 uses
    /// the polynomial `x`, i.e. `[0, 1]`.
    modulus: Vec<u128>,
}

/// A field `F_{p^e}` described by its base prime and a monic irreducible
/// modulus of degree `e`. Cloning is cheap (shared descriptor).
#[derive(Debug, Clone)]
pub struct ExtensionField(Arc<ExtFieldInner>);

impl PartialEq for ExtensionField {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.base == other.0.base && self.0.modulus == other.0.modulus)
    }
}

impl Eq for ExtensionField {}

impl ExtensionField {
    /// The base field viewed as a degree-1 extension with modulus `x`.
    pub fn base_field(base: PrimeField) -> Self {
        ExtensionField(Arc::new(ExtFieldInner {
            base,
            degree: 1,
            modulus: vec![0, 1],
        }))
    }

    /// Builds `F_{p^e}` from an explicit modulus, verifying that it is monic
    /// of degree `e` and irreducible (distinct-degree criterion:
    /// `gcd(x^{p^i} - x, m) = 1` for `i < e` and `x^{p^e} = x mod m`).
    pub fn with_modulus(base: PrimeField, modulus: Vec<u128>) -> Result<Self, FfError> {
        let e = modulus.len().checked_sub(1).ok_or(FfError::ZeroDegree)?;
        if e == 0 {
            return Err(FfError::ZeroDegree);
        }
        for &c in &modulus {
            if c >= base.modulus() {
                return Err(FfError::CoefficientOutOfRange(c, base.modulus()));
            }
        }
        if modulus[e] != 1 {
            return Err(FfError::NotIrreducible);
        }
        if e == 1 {
            if modulus != vec![0, 1] {
                // Any monic linear is a field, but the canonical base-field
                // descriptor is x so representations compare equal.
                return Err(FfError::NotIrreducible);
            }
            return Ok(Self::base_field(base));
        }
        if !modulus_is_irreducible(&base, &modulus) {
            return Err(FfError::NotIrreducible);
        }
        Ok(ExtensionField(Arc::new(ExtFieldInner {
            base,
            degree: e,
            modulus,
        })))
    }

    /// Samples a uniformly random monic irreducible of degree `e` by
    /// rejection; gives up after `64 * e` attempts.
    pub fn random<R: Rng + ?Sized>(
        base: PrimeField,
        e: usize,
        rng: &mut R,
    ) -> Result<Self, FfError> {
        if e == 0 {
            return Err(FfError::ZeroDegree);
        }
        if e == 1 {
            return Ok(Self::base_field(base));
        }
        let budget = 64 * e;
        for _ in 0..budget {
            let mut candidate: Vec<u128> = (0..e).map(|_| base.sample(rng)).collect();
            candidate.push(1);
            if modulus_is_irreducible(&base, &candidate) {
                return Ok(ExtensionField(Arc::new(ExtFieldInner {
                    base,
                    degree: e,
                    modulus: candidate,
                })));
            }
        }
        Err(FfError::IrreducibleSearchFailed(budget))
    }

    #[inline]
    pub fn base(&self) -> &PrimeField {
        &self.0.base
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.0.degree
    }

    #[inline]
    pub fn modulus_coeffs(&self) -> &[u128] {
        &self.0.modulus
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement {
            field: self.clone(),
            coeffs: vec![0; self.degree()],
        }
    }

    pub fn one(&self) -> FieldElement {
        let mut coeffs = vec![0; self.degree()];
        coeffs[0] = 1;
        FieldElement {
            field: self.clone(),
            coeffs,
        }
    }

    /// The residue class of `x`, a root of the modulus (for degree >= 2).
    pub fn generator(&self) -> FieldElement {
        let mut coeffs = vec![0; self.degree()];
        if self.degree() >= 2 {
            coeffs[1] = 1;
        } else {
            coeffs[0] = 0;
        }
        FieldElement {
            field: self.clone(),
            coeffs,
        }
    }

    /// Element from reduced coefficients (little-endian, length = degree).
    pub fn element(&self, coeffs: Vec<u128>) -> Result<FieldElement, FfError> {
        if coeffs.len() != self.degree() {
            return Err(FfError::WrongCoefficientCount {
                got: coeffs.len(),
                want: self.degree(),
            });
        }
        for &c in &coeffs {
            if c >= self.base().modulus() {
                return Err(FfError::CoefficientOutOfRange(c, self.base().modulus()));
            }
        }
        Ok(FieldElement {
            field: self.clone(),
            coeffs,
        })
    }

    /// Constant element from a base-field residue.
    pub fn constant(&self, value: u128) -> Result<FieldElement, FfError> {
        if value >= self.base().modulus() {
            return Err(FfError::CoefficientOutOfRange(value, self.base().modulus()));
        }
        let mut coeffs = vec![0; self.degree()];
        coeffs[0] = value;
        Ok(FieldElement {
            field: self.clone(),
            coeffs,
        })
    }

    /// Uniform random element.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> FieldElement {
        let coeffs = (0..self.degree()).map(|_| self.base().sample(rng)).collect();
        FieldElement {
            field: self.clone(),
            coeffs,
        }
    }

    // -- raw coefficient-slice arithmetic (shared with the poly module) -----

    pub(crate) fn add_raw(&self, a: &[u128], b: &[u128]) -> Vec<u128> {
        let p = self.base();
        a.iter().zip(b).map(|(&x, &y)| p.add(x, y)).collect()
    }

    pub(crate) fn sub_raw(&self, a: &[u128], b: &[u128]) -> Vec<u128> {
        let p = self.base();
        a.iter().zip(b).map(|(&x, &y)| p.sub(x, y)).collect()
    }

    pub(crate) fn neg_raw(&self, a: &[u128]) -> Vec<u128> {
        let p = self.base();
        a.iter().map(|&x| p.neg(x)).collect()
    }

    /// Product of two reduced elements, reduced modulo the field modulus.
    pub(crate) fn mul_raw(&self, a: &[u128], b: &[u128]) -> Vec<u128> {
        let e = self.degree();
        let p = self.base();
        if e == 1 {
            return vec![p.mul(a[0], b[0])];
        }
        // schoolbook product, degree <= 2e - 2
        let mut prod = vec![0u128; 2 * e - 1];
        for (i, &ai) in a.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                if bj != 0 {
                    prod[i + j] = p.add(prod[i + j], p.mul(ai, bj));
                }
            }
        }
        self.reduce_raw(&mut prod);
        prod.truncate(e);
        prod.resize(e, 0);
        prod
    }

    /// Reduces a coefficient vector in place modulo the (monic) modulus.
    pub(crate) fn reduce_raw(&self, v: &mut Vec<u128>) {
        let e = self.degree();
        let p = self.base();
        let m = &self.0.modulus;
        let mut k = v.len();
        while k > e {
            k -= 1;
            let lead = v[k];
            if lead != 0 {
                v[k] = 0;
                let shift = k - e;
                for i in 0..e {
                    if m[i] != 0 {
                        let t = p.mul(lead, m[i]);
                        v[shift + i] = p.sub(v[shift + i], t);
                    }
                }
            }
        }
        v.truncate(e.max(1));
    }

    /// Inverse via extended Euclid over `F_p[t]` against the modulus.
    pub(crate) fn inv_raw(&self, a: &[u128]) -> Result<Vec<u128>, FfError> {
        let p = self.base();
        if self.degree() == 1 {
            return Ok(vec![p.inv(a[0])?]);
        }
        if a.iter().all(|&c| c == 0) {
            return Err(FfError::DivisionByZero);
        }
        // extended Euclid on (a, m): r0 = a, r1 = m, track s with a*s = r mod m
        let trim = |v: &mut Vec<u128>| {
            while v.last() == Some(&0) {
                v.pop();
            }
        };
        let mut r0: Vec<u128> = a.to_vec();
        trim(&mut r0);
        let mut r1: Vec<u128> = self.0.modulus.clone();
        let mut s0: Vec<u128> = vec![1];
        let mut s1: Vec<u128> = vec![];
        while !r1.is_empty() {
            // (q, rem) = r0 / r1
            let lc_inv = p.inv(*r1.last().unwrap())?;
            let mut rem = r0.clone();
            let mut q: Vec<u128> = vec![0; rem.len().saturating_sub(r1.len()) + 1];
            while rem.len() >= r1.len() && !rem.is_empty() {
                let shift = rem.len() - r1.len();
                let coef = p.mul(*rem.last().unwrap(), lc_inv);
                if coef != 0 {
                    q[shift] = p.add(q[shift], coef);
                    for (i, &mi) in r1.iter().enumerate() {
                        if mi != 0 {
                            rem[shift + i] = p.sub(rem[shift + i], p.mul(coef, mi));
                        }
                    }
                }
                rem.pop();
                trim(&mut rem);
                if rem.len() < r1.len() {
                    break;
                }
            }
            trim(&mut q);
            // s_{k+1} = s0 - q * s1
            let mut qs = vec![0u128; q.len() + s1.len()];
            for (i, &qi) in q.iter().enumerate() {
                if qi == 0 {
                    continue;
                }
                for (j, &sj) in s1.iter().enumerate() {
                    if sj != 0 {
                        qs[i + j] = p.add(qs[i + j], p.mul(qi, sj));
                    }
                }
            }
            let n = s0.len().max(qs.len());
            let mut s_next = vec![0u128; n];
            for i in 0..n {
                let x = s0.get(i).copied().unwrap_or(0);
                let y = qs.get(i).copied().unwrap_or(0);
                s_next[i] = p.sub(x, y);
            }
            trim(&mut s_next);
            r0 = r1;
            r1 = rem;
            s0 = s1;
            s1 = s_next;
        }
        // r0 is the gcd; the modulus is irreducible so it must be a unit.
        if r0.len() != 1 {
            return Err(FfError::DivisionByZero);
        }
        let scale = p.inv(r0[0])?;
        let mut out = vec![0u128; self.degree()];
        for (i, &c) in s0.iter().enumerate() {
            out[i] = p.mul(c, scale);
        }
        Ok(out)
    }

    pub(crate) fn pow_raw(&self, base: &[u128], mut exp: u128) -> Vec<u128> {
        let mut acc = vec![0u128; self.degree()];
        acc[0] = 1;
        let mut b = base.to_vec();
        while exp != 0 {
            if exp & 1 == 1 {
                acc = self.mul_raw(&acc, &b);
            }
            exp >>= 1;
            if exp != 0 {
                b = self.mul_raw(&b, &b);
            }
        }
        acc
    }
}

/// Distinct-degree irreducibility criterion for a monic candidate of degree
/// `e >= 2` over `F_p`.
fn modulus_is_irreducible(base: &PrimeField, modulus: &[u128]) -> bool {
    let e = modulus.len() - 1;
    // Work in F_p[x]/(candidate) even though it may not be a field.
    let scratch = ExtensionField(Arc::new(ExtFieldInner {
        base: *base,
        degree: e,
        modulus: modulus.to_vec(),
    }));
    let p = base.modulus();
    let x = {
        let mut v = vec![0u128; e];
        v[1] = 1;
        v
    };
    let mut h = x.clone();
    for _ in 1..e {
        h = scratch.pow_raw(&h, p); // h = x^{p^i} mod m
        // gcd(h - x, m) must be 1
        let mut diff = scratch.sub_raw(&h, &x);
        while diff.last() == Some(&0) {
            diff.pop();
        }
        if diff.is_empty() {
            return false; // x^{p^i} = x, roots in a proper subfield
        }
        if !coprime_with_modulus(base, modulus, &diff) {
            return false;
        }
    }
    // x^{p^e} must equal x
    h = scratch.pow_raw(&h, p);
    h == x
}

/// gcd(poly, modulus) == 1 over F_p[t], with `poly` already reduced.
fn coprime_with_modulus(base: &PrimeField, modulus: &[u128], poly: &[u128]) -> bool {
    let p = base;
    let mut r0: Vec<u128> = modulus.to_vec();
    let mut r1: Vec<u128> = poly.to_vec();
    let trim = |v: &mut Vec<u128>| {
        while v.last() == Some(&0) {
            v.pop();
        }
    };
    trim(&mut r1);
    while !r1.is_empty() {
        let lc_inv = match p.inv(*r1.last().unwrap()) {
            Ok(v) => v,
            Err(_) => return false,
        };
        let mut rem = r0.clone();
        while rem.len() >= r1.len() && !rem.is_empty() {
            let shift = rem.len() - r1.len();
            let coef = p.mul(*rem.last().unwrap(), lc_inv);
            if coef != 0 {
                for (i, &mi) in r1.iter().enumerate() {
                    if mi != 0 {
                        rem[shift + i] = p.sub(rem[shift + i], p.mul(coef, mi));
                    }
                }
            }
            rem.pop();
            trim(&mut rem);
            if rem.len() < r1.len() {
                break;
            }
        }
        r0 = r1;
        r1 = rem;
    }
    r0.len() == 1
}

// ---------------------------------------------------------------------------
// Field element
// ---------------------------------------------------------------------------

/// An element of `F_{p^e}`: `e` reduced residues, little-endian in powers of
/// the residue-class generator. Always canonical (fully reduced).
#[derive(Debug, Clone)]
pub struct FieldElement {
    field: ExtensionField,
    coeffs: Vec<u128>,
}

/// Requested operation for [`arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Inv,
    Pow(u128),
}

/// Field arithmetic with explicit error reporting; `Inv` and `Pow` ignore `b`.
pub fn arith(a: &FieldElement, b: &FieldElement, op: ArithOp) -> Result<FieldElement, FfError> {
    match op {
        ArithOp::Inv => a.inv(),
        ArithOp::Pow(e) => Ok(a.pow(e)),
        _ => {
            if a.field != b.field {
                return Err(FfError::FieldMismatch);
            }
            let coeffs = match op {
                ArithOp::Add => a.field.add_raw(&a.coeffs, &b.coeffs),
                ArithOp::Sub => a.field.sub_raw(&a.coeffs, &b.coeffs),
                ArithOp::Mul => a.field.mul_raw(&a.coeffs, &b.coeffs),
                _ => unreachable!(),
            };
            Ok(FieldElement {
                field: a.field.clone(),
                coeffs,
            })
        }
    }
}

/// Lifts a base-field element into `target` as a constant coefficient.
/// This is a ring homomorphism.
pub fn embed(a: &FieldElement, target: &ExtensionField) -> Result<FieldElement, FfError> {
    if a.field().base() != target.base() {
        return Err(FfError::FieldMismatch);
    }
    if a.field().degree() != 1 {
        return Err(FfError::FieldMismatch);
    }
    target.constant(a.coeffs[0])
}

impl PartialEq for FieldElement {
    fn eq(&self, other: &Self) -> bool {
        self.field == other.field && self.coeffs == other.coeffs
    }
}

impl Eq for FieldElement {}

impl FieldElement {
    #[inline]
    pub fn field(&self) -> &ExtensionField {
        &self.field
    }

    #[inline]
    pub fn coeffs(&self) -> &[u128] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0] == 1 && self.coeffs[1..].iter().all(|&c| c == 0)
    }

    /// True when every coefficient above the constant is zero.
    pub fn is_base_valued(&self) -> bool {
        self.coeffs[1..].iter().all(|&c| c == 0)
    }

    fn same_field(&self, other: &Self) -> &ExtensionField {
        assert!(
            self.field == other.field,
            "field elements from different fields"
        );
        &self.field
    }

    pub fn add(&self, other: &Self) -> Self {
        let f = self.same_field(other);
        FieldElement {
            field: f.clone(),
            coeffs: f.add_raw(&self.coeffs, &other.coeffs),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        let f = self.same_field(other);
        FieldElement {
            field: f.clone(),
            coeffs: f.sub_raw(&self.coeffs, &other.coeffs),
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        let f = self.same_field(other);
        FieldElement {
            field: f.clone(),
            coeffs: f.mul_raw(&self.coeffs, &other.coeffs),
        }
    }

    pub fn neg(&self) -> Self {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.field.neg_raw(&self.coeffs),
        }
    }

    pub fn inv(&self) -> Result<Self, FfError> {
        Ok(FieldElement {
            field: self.field.clone(),
            coeffs: self.field.inv_raw(&self.coeffs)?,
        })
    }

    pub fn pow(&self, exp: u128) -> Self {
        FieldElement {
            field: self.field.clone(),
            coeffs: self.field.pow_raw(&self.coeffs, exp),
        }
    }

    /// Frobenius endomorphism `a -> a^p`.
    pub fn frobenius(&self) -> Self {
        self.pow(self.field.base().modulus())
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f7() -> ExtensionField {
        ExtensionField::base_field(PrimeField::small_field_ok(7).unwrap())
    }

    fn f49() -> ExtensionField {
        // t^2 + 1 is irreducible over F_7 (-1 is a non-residue)
        ExtensionField::with_modulus(PrimeField::small_field_ok(7).unwrap(), vec![1, 0, 1]).unwrap()
    }

    #[test]
    fn base_arith_examples() {
        let f = f7();
        let a = f.constant(3).unwrap();
        let b = f.constant(5).unwrap();
        assert_eq!(arith(&a, &b, ArithOp::Add).unwrap(), f.constant(1).unwrap());
        // inv(3) = 5 since 3*5 = 15 = 1 mod 7
        assert_eq!(a.inv().unwrap(), f.constant(5).unwrap());
        assert_eq!(f.zero().inv().unwrap_err(), FfError::DivisionByZero);
    }

    #[test]
    fn field_mismatch_is_reported() {
        let a = f7().constant(3).unwrap();
        let b = f49().constant(3).unwrap();
        assert_eq!(arith(&a, &b, ArithOp::Mul).unwrap_err(), FfError::FieldMismatch);
    }

    #[test]
    fn primality_checks() {
        assert!(is_prime(FAST_TEST_PRIME));
        assert!(is_prime(DEFAULT_PROTOCOL_PRIME));
        assert!(is_prime(101));
        assert!(!is_prime(1));
        assert!(!is_prime((1u128 << 61) + 1));
        assert_eq!(
            PrimeField::small_field_ok(91).unwrap_err(),
            FfError::NotPrime(91)
        );
        assert_eq!(
            PrimeField::new(FAST_TEST_PRIME).unwrap_err(),
            FfError::FieldTooSmall(FAST_TEST_PRIME)
        );
        assert!(PrimeField::new(DEFAULT_PROTOCOL_PRIME).is_ok());
        assert_eq!(
            PrimeField::small_field_ok(2).unwrap_err(),
            FfError::EvenCharacteristic
        );
    }

    #[test]
    fn extension_construction() {
        let p7 = PrimeField::small_field_ok(7).unwrap();
        // degree 1 collapses to the base field
        let e1 = ExtensionField::random(p7, 1, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert_eq!(e1.modulus_coeffs(), &[0, 1]);
        // x^2 + 1 is irreducible over F_7
        assert!(ExtensionField::with_modulus(p7, vec![1, 0, 1]).is_ok());
        // x^2 - 1 = (x-1)(x+1) is rejected
        assert_eq!(
            ExtensionField::with_modulus(p7, vec![6, 0, 1]).unwrap_err(),
            FfError::NotIrreducible
        );
        // random quadratics come back verified
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let f = ExtensionField::random(p7, 2, &mut rng).unwrap();
            assert_eq!(f.degree(), 2);
            assert_eq!(*f.modulus_coeffs().last().unwrap(), 1);
        }
    }

    #[test]
    fn embed_is_homomorphism() {
        let base = f7();
        let ext = f49();
        let a = base.constant(3).unwrap();
        let b = base.constant(5).unwrap();
        let ea = embed(&a, &ext).unwrap();
        let eb = embed(&b, &ext).unwrap();
        assert_eq!(ea.mul(&eb), embed(&a.mul(&b), &ext).unwrap());
        assert_eq!(ea.mul(&eb), ext.one());
        assert_eq!(embed(&base.zero(), &ext).unwrap(), ext.zero());
        assert_eq!(embed(&base.one(), &ext).unwrap(), ext.one());
    }

    #[test]
    fn field_axioms_random_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let p61 = PrimeField::small_field_ok(FAST_TEST_PRIME).unwrap();
        let p127 = PrimeField::small_field_ok(DEFAULT_PROTOCOL_PRIME).unwrap();
        let fields = [
            f7(),
            f49(),
            ExtensionField::base_field(p61),
            ExtensionField::base_field(p127),
            ExtensionField::random(p61, 3, &mut rng).unwrap(),
            ExtensionField::random(PrimeField::small_field_ok(13).unwrap(), 3, &mut rng).unwrap(),
        ];
        for field in &fields {
            for _ in 0..1000 {
                let a = field.sample(&mut rng);
                let b = field.sample(&mut rng);
                let c = field.sample(&mut rng);
                assert_eq!(a.add(&b), b.add(&a));
                assert_eq!(a.mul(&b), b.mul(&a));
                assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
                assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
                assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
                assert_eq!(a.add(&a.neg()), field.zero());
                if !a.is_zero() {
                    assert_eq!(a.mul(&a.inv().unwrap()), field.one());
                }
            }
        }
    }

    #[test]
    fn frobenius_fixes_the_field() {
        // a^{p^e} = a for random a
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p13 = PrimeField::small_field_ok(13).unwrap();
        for e in 1..=3usize {
            let field = ExtensionField::random(p13, e, &mut rng).unwrap();
            for _ in 0..50 {
                let a = field.sample(&mut rng);
                let mut frob = a.clone();
                for _ in 0..e {
                    frob = frob.frobenius();
                }
                assert_eq!(frob, a);
            }
        }
    }

    #[test]
    fn mersenne127_matches_wide_reduction() {
        let p = DEFAULT_PROTOCOL_PRIME;
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let a = rng.gen::<u128>() % p;
            let b = rng.gen::<u128>() % p;
            assert_eq!(mul_mersenne127(a, b), mul_wide(a, b, p));
        }
    }

    #[test]
    fn canonical_form_closure() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let field = f49();
        for _ in 0..200 {
            let a = field.sample(&mut rng);
            let b = field.sample(&mut rng);
            for v in [a.add(&b), a.sub(&b), a.mul(&b), a.neg()] {
                assert_eq!(v.coeffs().len(), field.degree());
                assert!(v.coeffs().iter().all(|&c| c < 7));
            }
        }
    }
}
