//! Root extraction inside an extension field `F_q`, `q = p^d`.
//!
//! Input is an irreducible degree-`d` polynomial `u` over `F_p`; viewed over
//! `F_q` it splits into `d` distinct linear factors. One root is found by
//! Cantor–Zassenhaus splitting of `u` in `F_q[y]` (random `r`, then
//! `gcd(r^((q-1)/2) - 1, u)`), and the remaining roots are its Frobenius
//! conjugates.
//!
//! The big exponent is never walked bit by bit: `r^((q-1)/2)` factors as
//! `N(r)^((p-1)/2)` with `N(r) = r^(1 + p + ... + p^(d-1))`, and the partial
//! norm `N` costs `d` applications of the p-power map, which is F_p-linear
//! on `F_q[y]/(v)` and therefore a precomputed matrix.

use rand::Rng;

use crate::ff::{ExtensionField, FieldElement};

use super::PolyError;

type QEl = Vec<u128>;
/// Little-endian coefficients in F_q, no trailing zeros.
type QPoly = Vec<QEl>;

pub(crate) fn q_trim(field: &ExtensionField, v: &mut QPoly) {
    while v.last().map(|c| is_zero_el(field, c)) == Some(true) {
        v.pop();
    }
}

fn is_zero_el(_field: &ExtensionField, c: &[u128]) -> bool {
    c.iter().all(|&x| x == 0)
}

fn zero_el(field: &ExtensionField) -> QEl {
    vec![0; field.degree()]
}

fn one_el(field: &ExtensionField) -> QEl {
    let mut v = vec![0; field.degree()];
    v[0] = 1;
    v
}

pub(crate) fn q_mul(field: &ExtensionField, a: &QPoly, b: &QPoly) -> QPoly {
    if a.is_empty() || b.is_empty() {
        return QPoly::new();
    }
    let mut out = vec![zero_el(field); a.len() + b.len() - 1];
    for (i, ai) in a.iter().enumerate() {
        if is_zero_el(field, ai) {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            if !is_zero_el(field, bj) {
                let t = field.mul_raw(ai, bj);
                out[i + j] = field.add_raw(&out[i + j], &t);
            }
        }
    }
    let mut out = out;
    q_trim(field, &mut out);
    out
}

/// Remainder modulo a monic divisor.
pub(crate) fn q_rem_monic(field: &ExtensionField, a: &QPoly, m: &QPoly) -> QPoly {
    let dm = m.len() - 1;
    let mut r = a.clone();
    q_trim(field, &mut r);
    while r.len() > dm {
        let lead = r.last().unwrap().clone();
        let shift = r.len() - 1 - dm;
        if !is_zero_el(field, &lead) {
            for (i, mi) in m[..dm].iter().enumerate() {
                if !is_zero_el(field, mi) {
                    let t = field.mul_raw(&lead, mi);
                    r[shift + i] = field.sub_raw(&r[shift + i], &t);
                }
            }
        }
        r.pop();
        q_trim(field, &mut r);
    }
    r
}

pub(crate) fn q_divrem(field: &ExtensionField, a: &QPoly, b: &QPoly) -> (QPoly, QPoly) {
    assert!(!b.is_empty());
    let lc_inv = field.inv_raw(b.last().unwrap()).expect("nonzero lc");
    let db = b.len() - 1;
    let mut r = a.clone();
    q_trim(field, &mut r);
    if r.len() <= db {
        return (QPoly::new(), r);
    }
    let mut q = vec![zero_el(field); r.len() - db];
    while r.len() > db {
        let shift = r.len() - 1 - db;
        let coef = field.mul_raw(r.last().unwrap(), &lc_inv);
        if !is_zero_el(field, &coef) {
            q[shift] = coef.clone();
            for (i, bi) in b[..db].iter().enumerate() {
                if !is_zero_el(field, bi) {
                    let t = field.mul_raw(&coef, bi);
                    r[shift + i] = field.sub_raw(&r[shift + i], &t);
                }
            }
        }
        r.pop();
        q_trim(field, &mut r);
    }
    q_trim(field, &mut q);
    (q, r)
}

pub(crate) fn q_monic(field: &ExtensionField, a: &QPoly) -> QPoly {
    match a.last() {
        None => QPoly::new(),
        Some(lc) if lc[0] == 1 && lc[1..].iter().all(|&c| c == 0) => a.clone(),
        Some(lc) => {
            let inv = field.inv_raw(lc).expect("nonzero lc");
            a.iter().map(|c| field.mul_raw(c, &inv)).collect()
        }
    }
}

pub(crate) fn q_gcd(field: &ExtensionField, a: &QPoly, b: &QPoly) -> QPoly {
    let mut r0 = a.clone();
    let mut r1 = b.clone();
    q_trim(field, &mut r0);
    q_trim(field, &mut r1);
    while !r1.is_empty() {
        let (_, rem) = q_divrem(field, &r0, &r1);
        r0 = r1;
        r1 = rem;
    }
    q_monic(field, &r0)
}

fn q_pow_mod(field: &ExtensionField, base: &QPoly, mut exp: u128, m: &QPoly) -> QPoly {
    let mut acc = vec![one_el(field)];
    let mut b = q_rem_monic(field, base, m);
    while exp != 0 {
        if exp & 1 == 1 {
            acc = q_rem_monic(field, &q_mul(field, &acc, &b), m);
        }
        exp >>= 1;
        if exp != 0 {
            b = q_rem_monic(field, &q_mul(field, &b, &b), m);
        }
    }
    acc
}

/// Lifts a base-field polynomial into `F_q[y]`.
pub(crate) fn lift(field: &ExtensionField, f: &[u128]) -> QPoly {
    f.iter()
        .map(|&c| {
            let mut v = zero_el(field);
            v[0] = c;
            v
        })
        .collect()
}

// ---------------------------------------------------------------------------
// p-power map on B = F_q[y]/(v) as an F_p-linear matrix
// ---------------------------------------------------------------------------

struct FrobeniusExt {
    /// deg v
    n: usize,
    /// field degree d
    d: usize,
    /// dim = n * d; columns[col][row], flattened basis t^j y^i -> i*d + j
    columns: Vec<Vec<u128>>,
}

impl FrobeniusExt {
    /// `xi` must be `y^p mod v` (callers reduce a parent's `xi` when
    /// descending to a factor of `v`).
    fn build(field: &ExtensionField, v: &QPoly, xi: &QPoly, omega: &QEl) -> Self {
        let n = v.len() - 1;
        let d = field.degree();
        let dim = n * d;
        // powers of xi in B and of omega in F_q
        let mut xi_pows: Vec<QPoly> = Vec::with_capacity(n);
        xi_pows.push(vec![one_el(field)]);
        for i in 1..n {
            let next = q_rem_monic(field, &q_mul(field, &xi_pows[i - 1], xi), v);
            xi_pows.push(next);
        }
        let mut omega_pows: Vec<QEl> = Vec::with_capacity(d);
        omega_pows.push(one_el(field));
        for j in 1..d {
            let next = field.mul_raw(&omega_pows[j - 1], omega);
            omega_pows.push(next);
        }
        let mut columns = Vec::with_capacity(dim);
        for i in 0..n {
            for j in 0..d {
                // phi(t^j y^i) = omega^j * xi^i
                let mut col = vec![0u128; dim];
                for (ci, coeff) in xi_pows[i].iter().enumerate() {
                    let scaled = field.mul_raw(coeff, &omega_pows[j]);
                    for (cj, &val) in scaled.iter().enumerate() {
                        col[ci * d + cj] = val;
                    }
                }
                columns.push(col);
            }
        }
        FrobeniusExt { n, d, columns }
    }

    fn flatten(&self, a: &QPoly) -> Vec<u128> {
        let mut out = vec![0u128; self.n * self.d];
        for (i, coeff) in a.iter().enumerate() {
            for (j, &c) in coeff.iter().enumerate() {
                out[i * self.d + j] = c;
            }
        }
        out
    }

    fn unflatten(&self, field: &ExtensionField, v: &[u128]) -> QPoly {
        let mut out: QPoly = (0..self.n)
            .map(|i| v[i * self.d..(i + 1) * self.d].to_vec())
            .collect();
        q_trim(field, &mut out);
        out
    }

    fn apply(&self, field: &ExtensionField, a: &QPoly) -> QPoly {
        let p = field.base();
        let flat = self.flatten(a);
        let dim = self.n * self.d;
        let mut out = vec![0u128; dim];
        for (c, &x) in flat.iter().enumerate() {
            if x == 0 {
                continue;
            }
            let col = &self.columns[c];
            for (r, &m) in col.iter().enumerate() {
                if m != 0 {
                    out[r] = p.add(out[r], p.mul(x, m));
                }
            }
        }
        self.unflatten(field, &out)
    }
}

/// `r^(1 + p + ... + p^(d-1)) mod v`.
fn partial_norm_ext(
    field: &ExtensionField,
    v: &QPoly,
    frob: &FrobeniusExt,
    r: &QPoly,
    d: usize,
) -> QPoly {
    let mut acc = r.clone();
    let mut conj = r.clone();
    for _ in 1..d {
        conj = frob.apply(field, &conj);
        acc = q_rem_monic(field, &q_mul(field, &acc, &conj), v);
    }
    acc
}

fn random_qpoly<R: Rng + ?Sized>(field: &ExtensionField, below: usize, rng: &mut R) -> QPoly {
    let mut v: QPoly = (0..below).map(|_| field.sample(rng).coeffs().to_vec()).collect();
    q_trim(field, &mut v);
    v
}

/// One root in `field` of an irreducible degree-d polynomial over F_p whose
/// roots all lie in `field` (d divides the field degree; the protocol always
/// has d equal to it).
pub(crate) fn one_root_in_field<R: Rng + ?Sized>(
    field: &ExtensionField,
    u: &[u128],
    budget: u32,
    rng: &mut R,
) -> Result<QEl, PolyError> {
    let p = field.base();
    let d = field.degree();
    let half = (p.modulus() - 1) / 2;
    let mut v = lift(field, u);
    // y^p mod v and t^p, shared down the descent
    let y = vec![zero_el(field), one_el(field)];
    let mut xi = q_pow_mod(field, &y, p.modulus(), &v);
    let omega = {
        let gen = field.generator();
        field.pow_raw(gen.coeffs(), p.modulus())
    };
    let mut attempts = 0u32;
    while v.len() - 1 > 1 {
        let frob = FrobeniusExt::build(field, &v, &xi, &omega);
        let mut split: Option<QPoly> = None;
        while attempts < budget {
            attempts += 1;
            let r = random_qpoly(field, v.len() - 1, rng);
            if r.is_empty() {
                continue;
            }
            // a shared factor with v is already a split
            let shared = q_gcd(field, &r, &v);
            if shared.len() > 1 && shared.len() < v.len() {
                split = Some(shared);
                break;
            }
            let norm = partial_norm_ext(field, &v, &frob, &r, d);
            let w = q_pow_mod(field, &norm, half, &v);
            if w.is_empty() {
                continue;
            }
            let mut w_minus_one = w;
            w_minus_one[0] = field.sub_raw(&w_minus_one[0], &one_el(field));
            q_trim(field, &mut w_minus_one);
            if w_minus_one.is_empty() {
                continue;
            }
            let g = q_gcd(field, &w_minus_one, &v);
            if g.len() > 1 && g.len() < v.len() {
                split = Some(g);
                break;
            }
        }
        let Some(g) = split else {
            return Err(PolyError::SplitBudgetExceeded);
        };
        // keep the smaller half, reducing the Frobenius seed along with it
        let (quot, _) = q_divrem(field, &v, &g);
        let keep = if g.len() <= quot.len() { g } else { quot };
        v = q_monic(field, &keep);
        xi = q_rem_monic(field, &xi, &v);
    }
    // v = y + c, root is -c
    let c = &v[0];
    Ok(field.neg_raw(c))
}

/// All `d` roots of an irreducible degree-d polynomial: one root plus its
/// Frobenius orbit.
pub(crate) fn roots_of_irreducible<R: Rng + ?Sized>(
    field: &ExtensionField,
    u: &[u128],
    budget: u32,
    rng: &mut R,
) -> Result<Vec<FieldElement>, PolyError> {
    let d = u.len() - 1;
    let p_mod = field.base().modulus();
    let first = if d == 1 {
        // monic linear: the root is -u[0], lifted as a constant
        let mut v = vec![0u128; field.degree()];
        v[0] = field.base().neg(u[0]);
        v
    } else {
        one_root_in_field(field, u, budget, rng)?
    };
    let mut roots = Vec::with_capacity(d);
    let mut cur = first;
    for _ in 0..d {
        roots.push(
            field
                .element(cur.clone())
                .expect("root coefficients are reduced"),
        );
        cur = field.pow_raw(&cur, p_mod);
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::PrimeField;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn finds_roots_of_modulus_polynomial() {
        // F_49 as F_7[t]/(t^2+1); the roots of x^2+1 are t and -t
        let p = PrimeField::small_field_ok(7).unwrap();
        let field = ExtensionField::with_modulus(p, vec![1, 0, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let roots = roots_of_irreducible(&field, &[1, 0, 1], 64, &mut rng).unwrap();
        let mut raw: Vec<Vec<u128>> = roots.iter().map(|r| r.coeffs().to_vec()).collect();
        raw.sort();
        assert_eq!(raw, vec![vec![0, 1], vec![0, 6]]);
    }

    #[test]
    fn root_orbit_covers_independent_modulus() {
        // roots of x^2+1 inside F_49 built with a different irreducible
        let p = PrimeField::small_field_ok(7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let field = ExtensionField::random(p, 2, &mut rng).unwrap();
        let roots = roots_of_irreducible(&field, &[1, 0, 1], 64, &mut rng).unwrap();
        assert_eq!(roots.len(), 2);
        for r in &roots {
            let sq = r.mul(r);
            assert_eq!(sq, field.constant(6).unwrap()); // r^2 = -1
        }
        assert_ne!(roots[0], roots[1]);
    }
}
