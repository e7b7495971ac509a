//! Dense polynomial arithmetic over the base prime field.
//!
//! Polynomials are little-endian `Vec<u128>` coefficient vectors with no
//! trailing zeros (the zero polynomial is the empty vector). Everything here
//! is `pub(crate)` plumbing shared by the public `poly` API and the protocol.

use rand::Rng;

use crate::ff::PrimeField;

/// Schoolbook multiplication switches to Karatsuba above this length.
const KARATSUBA_THRESHOLD: usize = 32;

pub(crate) fn trim(v: &mut Vec<u128>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

pub(crate) fn add(p: &PrimeField, a: &[u128], b: &[u128]) -> Vec<u128> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out.push(p.add(x, y));
    }
    trim(&mut out);
    out
}

pub(crate) fn sub(p: &PrimeField, a: &[u128], b: &[u128]) -> Vec<u128> {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).copied().unwrap_or(0);
        let y = b.get(i).copied().unwrap_or(0);
        out.push(p.sub(x, y));
    }
    trim(&mut out);
    out
}

pub(crate) fn scale(p: &PrimeField, a: &[u128], c: u128) -> Vec<u128> {
    if c == 0 {
        return Vec::new();
    }
    let mut out: Vec<u128> = a.iter().map(|&x| p.mul(x, c)).collect();
    trim(&mut out);
    out
}

fn mul_schoolbook(p: &PrimeField, a: &[u128], b: &[u128]) -> Vec<u128> {
    let mut out = vec![0u128; a.len() + b.len() - 1];
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0 {
            continue;
        }
        for (j, &bj) in b.iter().enumerate() {
            if bj != 0 {
                out[i + j] = p.add(out[i + j], p.mul(ai, bj));
            }
        }
    }
    out
}

pub(crate) fn mul(p: &PrimeField, a: &[u128], b: &[u128]) -> Vec<u128> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = if a.len().min(b.len()) < KARATSUBA_THRESHOLD {
        mul_schoolbook(p, a, b)
    } else {
        mul_karatsuba(p, a, b)
    };
    trim(&mut out);
    out
}

fn mul_karatsuba(p: &PrimeField, a: &[u128], b: &[u128]) -> Vec<u128> {
    let n = a.len().max(b.len());
    if a.len().min(b.len()) < KARATSUBA_THRESHOLD {
        return mul_schoolbook(p, a, b);
    }
    let half = n / 2;
    let (a0, a1) = a.split_at(half.min(a.len()));
    let (b0, b1) = b.split_at(half.min(b.len()));
    let z0 = if a0.is_empty() || b0.is_empty() {
        Vec::new()
    } else {
        mul_karatsuba(p, a0, b0)
    };
    let z2 = if a1.is_empty() || b1.is_empty() {
        Vec::new()
    } else {
        mul_karatsuba(p, a1, b1)
    };
    let a01 = add(p, a0, a1);
    let b01 = add(p, b0, b1);
    let z1 = if a01.is_empty() || b01.is_empty() {
        Vec::new()
    } else {
        mul_karatsuba(p, &a01, &b01)
    };
    let z1 = sub(p, &sub(p, &z1, &z0), &z2);
    let mut out = vec![0u128; a.len() + b.len() - 1];
    for (i, &c) in z0.iter().enumerate() {
        out[i] = p.add(out[i], c);
    }
    for (i, &c) in z1.iter().enumerate() {
        out[half + i] = p.add(out[half + i], c);
    }
    for (i, &c) in z2.iter().enumerate() {
        out[2 * half + i] = p.add(out[2 * half + i], c);
    }
    out
}

/// Remainder of `a` modulo a monic divisor.
pub(crate) fn rem_monic(p: &PrimeField, a: &[u128], m: &[u128]) -> Vec<u128> {
    debug_assert_eq!(m.last(), Some(&1));
    let mut r = a.to_vec();
    let dm = m.len() - 1;
    while r.len() > dm {
        let lead = *r.last().unwrap();
        let shift = r.len() - 1 - dm;
        if lead != 0 {
            for (i, &mi) in m[..dm].iter().enumerate() {
                if mi != 0 {
                    r[shift + i] = p.sub(r[shift + i], p.mul(lead, mi));
                }
            }
        }
        r.pop();
        trim(&mut r);
    }
    r
}

/// Quotient and remainder for an arbitrary nonzero divisor.
pub(crate) fn div_rem(p: &PrimeField, a: &[u128], b: &[u128]) -> (Vec<u128>, Vec<u128>) {
    assert!(!b.is_empty(), "division by the zero polynomial");
    let lc_inv = p.inv(*b.last().unwrap()).expect("nonzero leading coefficient");
    let db = b.len() - 1;
    let mut r = a.to_vec();
    trim(&mut r);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![0u128; r.len() - db];
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let coef = p.mul(*r.last().unwrap(), lc_inv);
        if coef != 0 {
            q[shift] = coef;
            for (i, &bi) in b[..db].iter().enumerate() {
                if bi != 0 {
                    r[shift + i] = p.sub(r[shift + i], p.mul(coef, bi));
                }
            }
        }
        r.pop();
        trim(&mut r);
    }
    trim(&mut q);
    (q, r)
}

/// Exact division; panics if the remainder is nonzero.
pub(crate) fn exact_div(p: &PrimeField, a: &[u128], b: &[u128]) -> Vec<u128> {
    let (q, r) = div_rem(p, a, b);
    assert!(r.is_empty(), "division was not exact");
    q
}

pub(crate) fn monic(p: &PrimeField, a: &[u128]) -> Vec<u128> {
    match a.last() {
        None => Vec::new(),
        Some(&1) => a.to_vec(),
        Some(&lc) => scale(p, a, p.inv(lc).expect("nonzero leading coefficient")),
    }
}

/// Monic gcd by Euclid's algorithm.
pub(crate) fn gcd(p: &PrimeField, a: &[u128], b: &[u128]) -> Vec<u128> {
    let mut r0 = a.to_vec();
    let mut r1 = b.to_vec();
    trim(&mut r0);
    trim(&mut r1);
    while !r1.is_empty() {
        let (_, rem) = div_rem(p, &r0, &r1);
        r0 = r1;
        r1 = rem;
    }
    monic(p, &r0)
}

pub(crate) fn derivative(p: &PrimeField, a: &[u128]) -> Vec<u128> {
    if a.len() <= 1 {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(a.len() - 1);
    for (i, &c) in a.iter().enumerate().skip(1) {
        out.push(p.mul(c, (i as u128) % p.modulus()));
    }
    trim(&mut out);
    out
}

pub(crate) fn eval(p: &PrimeField, a: &[u128], x: u128) -> u128 {
    let mut acc = 0u128;
    for &c in a.iter().rev() {
        acc = p.add(p.mul(acc, x), c);
    }
    acc
}

/// `base^exp mod m` in `F_p[x]/(m)`, `m` monic.
pub(crate) fn pow_mod(p: &PrimeField, base: &[u128], mut exp: u128, m: &[u128]) -> Vec<u128> {
    let mut acc = vec![1u128];
    let mut b = rem_monic(p, base, m);
    while exp != 0 {
        if exp & 1 == 1 {
            acc = rem_monic(p, &mul(p, &acc, &b), m);
        }
        exp >>= 1;
        if exp != 0 {
            b = rem_monic(p, &mul(p, &b, &b), m);
        }
    }
    acc
}

pub(crate) fn random_poly<R: Rng + ?Sized>(p: &PrimeField, below_deg: usize, rng: &mut R) -> Vec<u128> {
    let mut v: Vec<u128> = (0..below_deg).map(|_| p.sample(rng)).collect();
    trim(&mut v);
    v
}

// ---------------------------------------------------------------------------
// Frobenius matrix on F_p[x]/(g)
//
// The p-power map is F_p-linear; with its matrix in hand, the partial norm
// r^(1 + p + ... + p^(d-1)) mod g costs d matrix applications instead of
// d full modular exponentiations.
// ---------------------------------------------------------------------------

pub(crate) struct FrobeniusMap {
    n: usize,
    /// columns[j] = x^{jp} mod g, as a length-n vector
    columns: Vec<Vec<u128>>,
}

impl FrobeniusMap {
    /// `xi` must be `x^p mod g`.
    pub(crate) fn build(p: &PrimeField, g: &[u128], xi: &[u128]) -> Self {
        let n = g.len() - 1;
        let mut columns = Vec::with_capacity(n);
        let mut col = vec![0u128; 1];
        col[0] = 1;
        columns.push(pad(&col, n));
        let mut cur = xi.to_vec();
        for _ in 1..n {
            columns.push(pad(&cur, n));
            cur = rem_monic(p, &mul(p, &cur, xi), g);
        }
        FrobeniusMap { n, columns }
    }

    /// Applies the p-power map to a reduced element.
    pub(crate) fn apply(&self, p: &PrimeField, v: &[u128]) -> Vec<u128> {
        let mut out = vec![0u128; self.n];
        for (j, &c) in v.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (i, &m) in self.columns[j].iter().enumerate() {
                if m != 0 {
                    out[i] = p.add(out[i], p.mul(c, m));
                }
            }
        }
        let mut out = out;
        trim(&mut out);
        out
    }
}

fn pad(v: &[u128], n: usize) -> Vec<u128> {
    let mut out = v.to_vec();
    out.resize(n, 0);
    out
}

/// `r^(1 + p + p^2 + ... + p^(d-1)) mod g` via repeated Frobenius.
pub(crate) fn partial_norm(
    p: &PrimeField,
    g: &[u128],
    frob: &FrobeniusMap,
    r: &[u128],
    d: usize,
) -> Vec<u128> {
    let mut acc = r.to_vec();
    let mut conj = r.to_vec();
    for _ in 1..d {
        conj = frob.apply(p, &conj);
        acc = rem_monic(p, &mul(p, &acc, &conj), g);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::PrimeField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p7() -> PrimeField {
        PrimeField::small_field_ok(7).unwrap()
    }

    #[test]
    fn div_rem_roundtrip() {
        let p = p7();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..200 {
            let a = random_poly(&p, 9, &mut rng);
            let mut b = random_poly(&p, 5, &mut rng);
            if b.is_empty() {
                b = vec![1];
            }
            let (q, r) = div_rem(&p, &a, &b);
            let back = add(&p, &mul(&p, &q, &b), &r);
            assert_eq!(back, a);
            assert!(r.len() < b.len() || r.is_empty());
        }
    }

    #[test]
    fn karatsuba_matches_schoolbook() {
        let p = PrimeField::small_field_ok(crate::ff::FAST_TEST_PRIME).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for len in [33usize, 48, 70, 101] {
            let a = random_poly(&p, len, &mut rng);
            let b = random_poly(&p, len, &mut rng);
            if a.is_empty() || b.is_empty() {
                continue;
            }
            assert_eq!(mul(&p, &a, &b), {
                let mut v = mul_schoolbook(&p, &a, &b);
                trim(&mut v);
                v
            });
        }
    }

    #[test]
    fn frobenius_map_matches_pow() {
        let p = p7();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        // g = x^4 + x + 1-ish random monic
        for _ in 0..20 {
            let mut g = random_poly(&p, 4, &mut rng);
            g.resize(4, 0);
            g.push(1);
            let x = vec![0u128, 1];
            let xi = pow_mod(&p, &x, p.modulus(), &g);
            let frob = FrobeniusMap::build(&p, &g, &xi);
            for _ in 0..20 {
                let r = random_poly(&p, 4, &mut rng);
                let direct = pow_mod(&p, &r, p.modulus(), &g);
                assert_eq!(frob.apply(&p, &r), direct);
            }
        }
    }

    #[test]
    fn partial_norm_is_geometric_power() {
        let p = p7();
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let mut g = random_poly(&p, 6, &mut rng);
        g.resize(6, 0);
        g.push(1);
        let x = vec![0u128, 1];
        let xi = pow_mod(&p, &x, p.modulus(), &g);
        let frob = FrobeniusMap::build(&p, &g, &xi);
        for d in 1..=3usize {
            for _ in 0..10 {
                let r = random_poly(&p, 6, &mut rng);
                if r.is_empty() {
                    continue;
                }
                // exponent 1 + 7 + ... + 7^{d-1}
                let exp: u128 = (0..d).map(|i| 7u128.pow(i as u32)).sum();
                assert_eq!(partial_norm(&p, &g, &frob, &r, d), pow_mod(&p, &r, exp, &g));
            }
        }
    }
}
