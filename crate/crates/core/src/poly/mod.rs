//! Polynomial arithmetic over `F_p` and `F_{p^e}`: Newton interpolation,
//! gcd, Frobenius powers, distinct-degree root location and probabilistic
//! root extraction.
//!
//! Representation is dense throughout; protocol degrees stay around a
//! hundred, so schoolbook multiplication with a Karatsuba crossover is the
//! right tool. Root finding follows the classic two-stage plan: first
//! distinct-degree factorization tells, for each extension degree `d`, how
//! many roots live in `F_{p^d}`; then Cantor–Zassenhaus equal-degree
//! splitting separates same-degree factors and extracts their roots inside
//! the requested field. Splitting is probabilistic with success chance about
//! one half per attempt, so every split carries an attempt budget.

pub(crate) mod base;
pub(crate) mod extroot;
mod interp;

use std::collections::BTreeMap;

use rand::Rng;
use thiserror::Error;

use crate::ff::{ExtensionField, FfError, FieldElement};

pub(crate) use self::base as base_ops;
pub(crate) use self::extroot as ext_ops;
pub(crate) use self::interp::{newton_interpolate, BaseArith, ExtArith};

/// Default number of random split attempts per factor before giving up.
pub const DEFAULT_SPLIT_BUDGET: u32 = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PolyError {
    #[error("two interpolation points share an abscissa")]
    DuplicateAbscissa,
    #[error("interpolation requires at least one point")]
    EmptyPoints,
    #[error("operands live in different fields")]
    FieldMismatch,
    #[error("polynomial degree must be at least 1")]
    DegreeTooSmall,
    #[error("frobenius power requires e >= 1")]
    ZeroFrobeniusPower,
    #[error("polynomial is not squarefree (gcd with derivative is nontrivial)")]
    NotSquarefree,
    #[error("gcd of two zero polynomials is undefined")]
    BothZero,
    #[error("no proper factor found within the split attempt budget")]
    SplitBudgetExceeded,
    #[error("polynomial degree {0} is not a multiple of the target factor degree {1}")]
    WrongFactorDegree(usize, usize),
    #[error("equal-degree splitting requires an odd base prime")]
    EvenCharacteristic,
    #[error(transparent)]
    Field(#[from] FfError),
}

// ---------------------------------------------------------------------------
// Polynomial
// ---------------------------------------------------------------------------

/// Dense polynomial over a declared field. The coefficient sequence is
/// low-to-high with a nonzero leading coefficient; the zero polynomial has an
/// empty sequence.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Polynomial {
    field: ExtensionField,
    coeffs: Vec<FieldElement>,
}

impl Polynomial {
    pub fn zero(field: &ExtensionField) -> Self {
        Polynomial {
            field: field.clone(),
            coeffs: Vec::new(),
        }
    }

    pub fn from_coeffs(
        field: &ExtensionField,
        mut coeffs: Vec<FieldElement>,
    ) -> Result<Self, PolyError> {
        for c in &coeffs {
            if c.field() != field {
                return Err(PolyError::FieldMismatch);
            }
        }
        while coeffs.last().map(FieldElement::is_zero) == Some(true) {
            coeffs.pop();
        }
        Ok(Polynomial {
            field: field.clone(),
            coeffs,
        })
    }

    /// Polynomial over `field` from raw residues; `field` may have any
    /// degree, each residue becomes a constant coefficient.
    pub fn from_base_coeffs(field: &ExtensionField, coeffs: &[u128]) -> Result<Self, PolyError> {
        let elems = coeffs
            .iter()
            .map(|&c| field.constant(c))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_coeffs(field, elems)
    }

    pub fn field(&self) -> &ExtensionField {
        &self.field
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn degree(&self) -> Option<usize> {
        if self.coeffs.is_empty() {
            None
        } else {
            Some(self.coeffs.len() - 1)
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn leading_coefficient(&self) -> Option<&FieldElement> {
        self.coeffs.last()
    }

    pub fn is_monic(&self) -> bool {
        self.leading_coefficient().map(FieldElement::is_one) == Some(true)
    }

    /// Raw residues when every coefficient is base-valued (always true for
    /// base-field polynomials).
    pub fn base_coeff_vec(&self) -> Option<Vec<u128>> {
        let mut out = Vec::with_capacity(self.coeffs.len());
        for c in &self.coeffs {
            if !c.is_base_valued() {
                return None;
            }
            out.push(c.coeffs()[0]);
        }
        Some(out)
    }

    fn raw_base(&self) -> Vec<u128> {
        debug_assert_eq!(self.field.degree(), 1);
        self.coeffs.iter().map(|c| c.coeffs()[0]).collect()
    }

    fn from_raw_base(field: &ExtensionField, raw: Vec<u128>) -> Self {
        debug_assert_eq!(field.degree(), 1);
        let coeffs = raw
            .into_iter()
            .map(|c| field.constant(c).expect("reduced residue"))
            .collect();
        Polynomial {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn derivative(&self) -> Self {
        if self.field.degree() == 1 {
            let raw = base_ops::derivative(self.field.base(), &self.raw_base());
            return Self::from_raw_base(&self.field, raw);
        }
        let p = self.field.base().modulus();
        let mut coeffs = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().skip(1) {
            let k = self
                .field
                .constant((i as u128) % p)
                .expect("reduced residue");
            coeffs.push(c.mul(&k));
        }
        Polynomial::from_coeffs(&self.field, coeffs).expect("same field")
    }

    pub fn monic(&self) -> Self {
        match self.leading_coefficient() {
            None => self.clone(),
            Some(lc) if lc.is_one() => self.clone(),
            Some(lc) => {
                let inv = lc.inv().expect("nonzero leading coefficient");
                let coeffs = self.coeffs.iter().map(|c| c.mul(&inv)).collect();
                Polynomial {
                    field: self.field.clone(),
                    coeffs,
                }
            }
        }
    }

    /// `self - c` for a base residue `c` (shifts the constant term).
    pub fn sub_constant(&self, c: u128) -> Result<Self, PolyError> {
        let val = self.field.constant(c)?;
        let mut coeffs = self.coeffs.clone();
        if coeffs.is_empty() {
            coeffs.push(val.neg());
        } else {
            coeffs[0] = coeffs[0].sub(&val);
        }
        Polynomial::from_coeffs(&self.field, coeffs)
    }
}

// ---------------------------------------------------------------------------
// Interpolation and evaluation
// ---------------------------------------------------------------------------

/// The unique polynomial of degree `<= n-1` through `n` points, by Newton's
/// divided differences. All points must live in `field`.
pub fn interpolate(
    points: &[(FieldElement, FieldElement)],
    field: &ExtensionField,
) -> Result<Polynomial, PolyError> {
    if points.is_empty() {
        return Err(PolyError::EmptyPoints);
    }
    for (x, y) in points {
        if x.field() != field || y.field() != field {
            return Err(PolyError::FieldMismatch);
        }
    }
    if field.degree() == 1 {
        let ar = BaseArith(*field.base());
        let xs: Vec<u128> = points.iter().map(|(x, _)| x.coeffs()[0]).collect();
        let ys: Vec<u128> = points.iter().map(|(_, y)| y.coeffs()[0]).collect();
        let raw = newton_interpolate(&ar, &xs, &ys)?;
        Ok(Polynomial::from_raw_base(field, raw))
    } else {
        let ar = ExtArith(field.clone());
        let xs: Vec<Vec<u128>> = points.iter().map(|(x, _)| x.coeffs().to_vec()).collect();
        let ys: Vec<Vec<u128>> = points.iter().map(|(_, y)| y.coeffs().to_vec()).collect();
        let raw = newton_interpolate(&ar, &xs, &ys)?;
        let coeffs = raw
            .into_iter()
            .map(|c| field.element(c).expect("reduced"))
            .collect();
        Polynomial::from_coeffs(field, coeffs)
    }
}

/// Horner evaluation of `f` at `x`. The point may live in an extension of
/// `f`'s coefficient field over the same base prime; base-field coefficients
/// are embedded on the fly.
pub fn evaluate(f: &Polynomial, x: &FieldElement) -> Result<FieldElement, PolyError> {
    let xf = x.field();
    if f.field() == xf {
        if xf.degree() == 1 {
            let v = base_ops::eval(xf.base(), &f.raw_base(), x.coeffs()[0]);
            return Ok(xf.constant(v).expect("reduced"));
        }
        let ar = ExtArith(xf.clone());
        let coeffs: Vec<Vec<u128>> = f.coeffs.iter().map(|c| c.coeffs().to_vec()).collect();
        let v = interp::horner(&ar, &coeffs, &x.coeffs().to_vec());
        return Ok(xf.element(v).expect("reduced"));
    }
    // embed: f over the base field, x in an extension over the same prime
    if f.field().degree() != 1 || f.field().base() != xf.base() {
        return Err(PolyError::FieldMismatch);
    }
    let raw = f.raw_base();
    let mut acc = vec![0u128; xf.degree()];
    for &c in raw.iter().rev() {
        acc = xf.mul_raw(&acc, x.coeffs());
        acc[0] = xf.base().add(acc[0], c);
    }
    Ok(xf.element(acc).expect("reduced"))
}

// ---------------------------------------------------------------------------
// gcd, Frobenius powers, distinct-degree location
// ---------------------------------------------------------------------------

/// Monic greatest common divisor by Euclid's algorithm.
pub fn poly_gcd(f: &Polynomial, g: &Polynomial) -> Result<Polynomial, PolyError> {
    if f.field() != g.field() {
        return Err(PolyError::FieldMismatch);
    }
    if f.is_zero() && g.is_zero() {
        return Err(PolyError::BothZero);
    }
    let field = f.field();
    if field.degree() == 1 {
        let raw = base_ops::gcd(field.base(), &f.raw_base(), &g.raw_base());
        return Ok(Polynomial::from_raw_base(field, raw));
    }
    let a: Vec<Vec<u128>> = f.coeffs.iter().map(|c| c.coeffs().to_vec()).collect();
    let b: Vec<Vec<u128>> = g.coeffs.iter().map(|c| c.coeffs().to_vec()).collect();
    let raw = ext_ops::q_gcd(field, &a, &b);
    let coeffs = raw
        .into_iter()
        .map(|c| field.element(c).expect("reduced"))
        .collect();
    Polynomial::from_coeffs(field, coeffs)
}

/// `x^{p^e} mod f` for a monic base-field polynomial, computed by `e`
/// successive p-th powerings in `F_p[x]/(f)`; `x^{p^e}` itself is never
/// materialized.
pub fn frobenius_power(f: &Polynomial, e: usize) -> Result<Polynomial, PolyError> {
    if f.field().degree() != 1 {
        return Err(PolyError::FieldMismatch);
    }
    if f.degree().unwrap_or(0) < 1 {
        return Err(PolyError::DegreeTooSmall);
    }
    if e == 0 {
        return Err(PolyError::ZeroFrobeniusPower);
    }
    let p = f.field().base();
    let raw = f.monic().raw_base();
    let mut h = vec![0u128, 1];
    h = base_ops::rem_monic(p, &h, &raw);
    for _ in 0..e {
        h = base_ops::pow_mod(p, &h, p.modulus(), &raw);
    }
    Ok(Polynomial::from_raw_base(f.field(), h))
}

/// Where the roots of a squarefree polynomial live, by extension degree.
#[derive(Debug, Clone)]
pub struct RootLocation {
    /// degree d -> number of roots whose minimal field is `F_{p^d}`
    pub roots_per_degree: BTreeMap<usize, usize>,
    /// degree d -> product of the irreducible degree-d factors
    pub factors_per_degree: BTreeMap<usize, Polynomial>,
    /// product of factors of degree beyond the cap, if any
    pub unlocated_remainder: Option<Polynomial>,
}

impl RootLocation {
    pub fn unlocated_degree(&self) -> usize {
        self.unlocated_remainder
            .as_ref()
            .and_then(Polynomial::degree)
            .unwrap_or(0)
    }

    pub fn located_root_total(&self) -> usize {
        self.roots_per_degree.values().sum()
    }
}

/// Distinct-degree factorization of a monic squarefree base-field
/// polynomial, capped at `max_degree`. For each `d` the peeled factor
/// `gcd(x^{p^d} - x, f)` contributes `deg/d` irreducible factors, i.e. `deg`
/// roots with minimal field `F_{p^d}`.
pub fn distinct_degree_locate(
    f: &Polynomial,
    max_degree: usize,
) -> Result<RootLocation, PolyError> {
    if f.field().degree() != 1 {
        return Err(PolyError::FieldMismatch);
    }
    if f.degree().unwrap_or(0) < 1 {
        return Err(PolyError::DegreeTooSmall);
    }
    let p = f.field().base();
    let raw = f.monic().raw_base();
    let der = base_ops::derivative(p, &raw);
    if base_ops::gcd(p, &raw, &der).len() != 1 {
        return Err(PolyError::NotSquarefree);
    }
    let mut remaining = raw;
    let mut roots_per_degree = BTreeMap::new();
    let mut factors_per_degree = BTreeMap::new();
    let mut h = vec![0u128, 1]; // x^{p^0}
    let mut d = 0usize;
    while remaining.len() > 1 && d < max_degree {
        d += 1;
        // once 2d exceeds the remaining degree it must be irreducible
        if 2 * d > remaining.len() - 1 {
            let deg = remaining.len() - 1;
            if deg <= max_degree {
                roots_per_degree.insert(deg, deg);
                factors_per_degree
                    .insert(deg, Polynomial::from_raw_base(f.field(), remaining.clone()));
                remaining = vec![1];
            }
            break;
        }
        h = base_ops::pow_mod(p, &h, p.modulus(), &remaining);
        let mut h_minus_x = base_ops::sub(p, &h, &[0, 1]);
        base_ops::trim(&mut h_minus_x);
        let g = if h_minus_x.is_empty() {
            remaining.clone()
        } else {
            base_ops::gcd(p, &h_minus_x, &remaining)
        };
        if g.len() > 1 {
            let count = g.len() - 1;
            roots_per_degree.insert(d, count);
            factors_per_degree.insert(d, Polynomial::from_raw_base(f.field(), g.clone()));
            remaining = base_ops::exact_div(p, &remaining, &g);
            h = base_ops::rem_monic(p, &h, &remaining);
        }
    }
    let unlocated_remainder = if remaining.len() > 1 {
        Some(Polynomial::from_raw_base(f.field(), remaining))
    } else {
        None
    };
    Ok(RootLocation {
        roots_per_degree,
        factors_per_degree,
        unlocated_remainder,
    })
}

// ---------------------------------------------------------------------------
// Equal-degree splitting and root extraction
// ---------------------------------------------------------------------------

/// Splits a monic squarefree product of distinct irreducible degree-d
/// factors into those factors (Cantor–Zassenhaus).
pub(crate) fn equal_degree_split<R: Rng + ?Sized>(
    field: &ExtensionField,
    g: &[u128],
    d: usize,
    budget: u32,
    rng: &mut R,
) -> Result<Vec<Vec<u128>>, PolyError> {
    let p = field.base();
    if p.modulus() == 2 {
        return Err(PolyError::EvenCharacteristic);
    }
    let half = (p.modulus() - 1) / 2;
    let mut work = vec![g.to_vec()];
    let mut done = Vec::new();
    // xi = x^p mod g once; descendants reduce it modulo their factor
    let x = vec![0u128, 1];
    let mut xi_for: Vec<(Vec<u128>, Vec<u128>)> = Vec::new();
    let top_xi = base_ops::pow_mod(p, &x, p.modulus(), g);
    xi_for.push((g.to_vec(), top_xi));
    while let Some(cur) = work.pop() {
        let deg = cur.len() - 1;
        if deg == d {
            done.push(cur);
            continue;
        }
        let xi = xi_for
            .iter()
            .rev()
            .find(|(poly, _)| *poly == cur)
            .map(|(_, xi)| xi.clone())
            .unwrap_or_else(|| base_ops::pow_mod(p, &x, p.modulus(), &cur));
        let frob = if d > 1 {
            Some(base_ops::FrobeniusMap::build(p, &cur, &xi))
        } else {
            None
        };
        let mut split = None;
        for _ in 0..budget {
            let r = base_ops::random_poly(p, deg, rng);
            if r.is_empty() {
                continue;
            }
            let shared = base_ops::gcd(p, &r, &cur);
            if shared.len() > 1 && shared.len() < cur.len() {
                split = Some(shared);
                break;
            }
            let norm = match &frob {
                Some(fr) => base_ops::partial_norm(p, &cur, fr, &r, d),
                None => r,
            };
            let w = base_ops::pow_mod(p, &norm, half, &cur);
            let mut w_minus_1 = base_ops::sub(p, &w, &[1]);
            base_ops::trim(&mut w_minus_1);
            if w_minus_1.is_empty() {
                continue;
            }
            let h = base_ops::gcd(p, &w_minus_1, &cur);
            if h.len() > 1 && h.len() < cur.len() {
                split = Some(h);
                break;
            }
        }
        let Some(h) = split else {
            return Err(PolyError::SplitBudgetExceeded);
        };
        let other = base_ops::exact_div(p, &cur, &h);
        let h = base_ops::monic(p, &h);
        let other = base_ops::monic(p, &other);
        let xi_h = base_ops::rem_monic(p, &xi, &h);
        let xi_o = base_ops::rem_monic(p, &xi, &other);
        xi_for.push((h.clone(), xi_h));
        xi_for.push((other.clone(), xi_o));
        work.push(h);
        work.push(other);
    }
    Ok(done)
}

/// All roots, inside `field` of degree `d`, of a monic squarefree base-field
/// polynomial whose irreducible factors all have degree exactly `d` (the
/// per-degree product from [`distinct_degree_locate`]).
pub fn roots_in_field<R: Rng + ?Sized>(
    f_d: &Polynomial,
    field: &ExtensionField,
    rng: &mut R,
) -> Result<Vec<FieldElement>, PolyError> {
    roots_in_field_with_budget(f_d, field, DEFAULT_SPLIT_BUDGET, rng)
}

/// [`roots_in_field`] with an explicit split-attempt budget per factor.
pub fn roots_in_field_with_budget<R: Rng + ?Sized>(
    f_d: &Polynomial,
    field: &ExtensionField,
    budget: u32,
    rng: &mut R,
) -> Result<Vec<FieldElement>, PolyError> {
    if f_d.field().degree() != 1 || f_d.field().base() != field.base() {
        return Err(PolyError::FieldMismatch);
    }
    if field.base().modulus() == 2 {
        return Err(PolyError::EvenCharacteristic);
    }
    let d = field.degree();
    let deg = f_d.degree().ok_or(PolyError::DegreeTooSmall)?;
    if deg == 0 {
        return Err(PolyError::DegreeTooSmall);
    }
    if deg % d != 0 {
        return Err(PolyError::WrongFactorDegree(deg, d));
    }
    let raw = f_d.monic().raw_base();
    let factors = if deg == d {
        vec![raw]
    } else {
        equal_degree_split(f_d.field(), &raw, d, budget, rng)?
    };
    let mut roots = Vec::with_capacity(deg);
    for u in factors {
        roots.extend(ext_ops::roots_of_irreducible(field, &u, budget, rng)?);
    }
    Ok(roots)
}

/// Minimal polynomial over `F_p` of an extension-field element, as the
/// product over its Frobenius orbit.
pub fn minimal_polynomial(a: &FieldElement) -> Polynomial {
    let field = a.field();
    let base = ExtensionField::base_field(*field.base());
    if field.degree() == 1 {
        // x - a
        let raw = vec![field.base().neg(a.coeffs()[0]), 1];
        return Polynomial::from_raw_base(&base, raw);
    }
    // collect the orbit
    let mut orbit = vec![a.clone()];
    let mut cur = a.frobenius();
    while cur != *a {
        orbit.push(cur.clone());
        cur = cur.frobenius();
    }
    // product of (y - alpha_i) over F_q
    let mut poly: Vec<Vec<u128>> = vec![vec![0; field.degree()]];
    poly[0][0] = 1;
    for alpha in &orbit {
        let neg = alpha.neg();
        let factor = vec![neg.coeffs().to_vec(), {
            let mut one = vec![0; field.degree()];
            one[0] = 1;
            one
        }];
        poly = ext_ops::q_mul(field, &poly, &factor);
    }
    // coefficients are Frobenius-stable, hence base-valued
    let raw: Vec<u128> = poly
        .iter()
        .map(|c| {
            debug_assert!(c[1..].iter().all(|&x| x == 0));
            c[0]
        })
        .collect();
    Polynomial::from_raw_base(&base, raw)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::PrimeField;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn f7() -> ExtensionField {
        ExtensionField::base_field(PrimeField::small_field_ok(7).unwrap())
    }

    fn f49() -> ExtensionField {
        ExtensionField::with_modulus(PrimeField::small_field_ok(7).unwrap(), vec![1, 0, 1]).unwrap()
    }

    fn base_poly(field: &ExtensionField, coeffs: &[u128]) -> Polynomial {
        Polynomial::from_base_coeffs(field, coeffs).unwrap()
    }

    #[test]
    fn interpolation_examples() {
        let field = f7();
        let pt = |x: u128, y: u128| {
            (
                field.constant(x).unwrap(),
                field.constant(y).unwrap(),
            )
        };
        let f = interpolate(&[pt(1, 0), pt(2, 1), pt(3, 1)], &field).unwrap();
        assert_eq!(f, base_poly(&field, &[5, 6, 3]));

        let c = interpolate(&[pt(4, 6)], &field).unwrap();
        assert_eq!(c, base_poly(&field, &[6]));

        assert!(matches!(
            interpolate(&[pt(1, 0), pt(1, 1)], &field),
            Err(PolyError::DuplicateAbscissa)
        ));
    }

    #[test]
    fn evaluation_examples() {
        let field = f7();
        let f = base_poly(&field, &[5, 6, 3]);
        let x = field.constant(3).unwrap();
        assert_eq!(evaluate(&f, &x).unwrap(), field.constant(1).unwrap());
        // f(0) = constant coefficient
        assert_eq!(
            evaluate(&f, &field.zero()).unwrap(),
            field.constant(5).unwrap()
        );
        // base coefficients evaluated at an extension point: (x^2+1)(t) = 0
        let ext = f49();
        let g = base_poly(&field, &[1, 0, 1]);
        let t = ext.generator();
        assert!(evaluate(&g, &t).unwrap().is_zero());
    }

    #[test]
    fn gcd_examples() {
        let field = f7();
        // gcd(x^2 - 1, x - 1) = x - 1
        let a = base_poly(&field, &[6, 0, 1]);
        let b = base_poly(&field, &[6, 1]);
        assert_eq!(poly_gcd(&a, &b).unwrap(), b);
        // gcd(f, 0) = monic(f)
        let f = base_poly(&field, &[2, 4]);
        let z = Polynomial::zero(&field);
        assert_eq!(poly_gcd(&f, &z).unwrap(), f.monic());
        // gcd(x^2+1, x^2-1) = 1
        let c = base_poly(&field, &[1, 0, 1]);
        assert_eq!(poly_gcd(&c, &a).unwrap(), base_poly(&field, &[1]));
        assert!(matches!(
            poly_gcd(&z, &z),
            Err(PolyError::BothZero)
        ));
    }

    #[test]
    fn frobenius_power_examples() {
        let field = f7();
        let f = base_poly(&field, &[1, 0, 1]); // x^2 + 1
        // x^7 = -x mod (x^2+1)
        assert_eq!(frobenius_power(&f, 1).unwrap(), base_poly(&field, &[0, 6]));
        // x^49 = x mod (x^2+1): all roots in F_49
        assert_eq!(frobenius_power(&f, 2).unwrap(), base_poly(&field, &[0, 1]));
        assert!(matches!(
            frobenius_power(&f, 0),
            Err(PolyError::ZeroFrobeniusPower)
        ));
        assert!(matches!(
            frobenius_power(&base_poly(&field, &[3]), 1),
            Err(PolyError::DegreeTooSmall)
        ));
    }

    #[test]
    fn ddf_examples() {
        let field = f7();
        // x^2 - 1: two roots in F_7
        let f = base_poly(&field, &[6, 0, 1]);
        let loc = distinct_degree_locate(&f, 8).unwrap();
        assert_eq!(loc.roots_per_degree.get(&1), Some(&2));
        assert_eq!(loc.unlocated_degree(), 0);

        // x^2 + 1: no F_7 roots, splits in F_49
        let g = base_poly(&field, &[1, 0, 1]);
        let loc = distinct_degree_locate(&g, 8).unwrap();
        assert_eq!(loc.roots_per_degree.get(&1), None);
        assert_eq!(loc.roots_per_degree.get(&2), Some(&2));

        // (x^2+1)(x-3): product structure
        let h = base_poly(&field, &[4, 6, 4, 1]); // (x^2+1)(x+4) = x^3+4x^2+x+4
        let loc = distinct_degree_locate(&h, 8).unwrap();
        assert_eq!(loc.roots_per_degree.get(&1), Some(&1));
        assert_eq!(loc.roots_per_degree.get(&2), Some(&2));

        // repeated root rejected
        let sq = base_poly(&field, &[1, 2, 1]); // (x+1)^2
        assert!(matches!(
            distinct_degree_locate(&sq, 4),
            Err(PolyError::NotSquarefree)
        ));
    }

    #[test]
    fn ddf_respects_cap() {
        let field = f7();
        // x^2+1 has factors of degree 2 only; cap 1 leaves it unlocated
        let g = base_poly(&field, &[1, 0, 1]);
        let loc = distinct_degree_locate(&g, 1).unwrap();
        assert!(loc.roots_per_degree.is_empty());
        assert_eq!(loc.unlocated_degree(), 2);
    }

    #[test]
    fn roots_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        // x^2+1 over F_7 in F_49 (mod t^2+1): roots t and 6t
        let field = f7();
        let ext = f49();
        let f = base_poly(&field, &[1, 0, 1]);
        let roots = roots_in_field(&f, &ext, &mut rng).unwrap();
        let set: BTreeSet<Vec<u128>> = roots.iter().map(|r| r.coeffs().to_vec()).collect();
        assert_eq!(set, BTreeSet::from([vec![0, 1], vec![0, 6]]));

        // x^2-1 over F_7 in F_7: {1, 6}
        let g = base_poly(&field, &[6, 0, 1]);
        let roots = roots_in_field(&g, &field, &mut rng).unwrap();
        let set: BTreeSet<u128> = roots.iter().map(|r| r.coeffs()[0]).collect();
        assert_eq!(set, BTreeSet::from([1, 6]));

        // x^3+x+1 irreducible over F_5: three roots in F_125
        let f5 = ExtensionField::base_field(PrimeField::small_field_ok(5).unwrap());
        let h = base_poly(&f5, &[1, 1, 0, 1]);
        let ext125 = ExtensionField::random(*f5.base(), 3, &mut rng).unwrap();
        let roots = roots_in_field(&h, &ext125, &mut rng).unwrap();
        assert_eq!(roots.len(), 3);
        let distinct: BTreeSet<Vec<u128>> = roots.iter().map(|r| r.coeffs().to_vec()).collect();
        assert_eq!(distinct.len(), 3);
        for r in &roots {
            assert!(evaluate(&h, r).unwrap().is_zero());
        }
    }

    #[test]
    fn interpolation_round_trip_random() {
        // random f of degree <= 12, sampled points reproduce it exactly
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for field in [
            ExtensionField::base_field(PrimeField::small_field_ok(101).unwrap()),
            ExtensionField::base_field(
                PrimeField::small_field_ok(crate::ff::FAST_TEST_PRIME).unwrap(),
            ),
            f49(),
        ] {
            for _ in 0..50 {
                let deg = (rng.gen::<u64>() % 13) as usize;
                let mut coeffs: Vec<FieldElement> =
                    (0..=deg).map(|_| field.sample(&mut rng)).collect();
                if coeffs.last().unwrap().is_zero() {
                    *coeffs.last_mut().unwrap() = field.one();
                }
                let f = Polynomial::from_coeffs(&field, coeffs).unwrap();
                let mut xs = BTreeSet::new();
                while xs.len() < deg + 1 {
                    xs.insert(field.sample(&mut rng).coeffs().to_vec());
                }
                let points: Vec<(FieldElement, FieldElement)> = xs
                    .into_iter()
                    .map(|x| {
                        let xe = field.element(x).unwrap();
                        let ye = evaluate(&f, &xe).unwrap();
                        (xe, ye)
                    })
                    .collect();
                let back = interpolate(&points, &field).unwrap();
                assert_eq!(back, f);
            }
        }
    }

    #[test]
    fn root_soundness_and_completeness_small_fields() {
        // random squarefree f of degree <= 6: roots_in_field matches the
        // exhaustive scan of F_{p^e} as a set
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for p in [5u128, 7, 11, 13] {
            let pf = PrimeField::small_field_ok(p).unwrap();
            let base = ExtensionField::base_field(pf);
            for e in 1..=3usize {
                let ext = ExtensionField::random(pf, e, &mut rng).unwrap();
                for _ in 0..20 {
                    let f = loop {
                        let deg = 1 + (rng.gen::<u64>() % 6) as usize;
                        let mut raw = base_ops::random_poly(&pf, deg, &mut rng);
                        raw.resize(deg, 0);
                        raw.push(1);
                        let cand = Polynomial::from_raw_base(&base, raw.clone());
                        let der = base_ops::derivative(&pf, &raw);
                        if base_ops::gcd(&pf, &raw, &der).len() == 1 {
                            break cand;
                        }
                    };
                    // oracle: scan every element of F_{p^e}
                    let mut expected = BTreeSet::new();
                    let total = (p as u64).pow(e as u32);
                    for idx in 0..total {
                        let mut rem = idx;
                        let mut coeffs = vec![0u128; e];
                        for c in coeffs.iter_mut() {
                            *c = (rem % p as u64) as u128;
                            rem /= p as u64;
                        }
                        let x = ext.element(coeffs).unwrap();
                        if evaluate(&f, &x).unwrap().is_zero() {
                            expected.insert(x.coeffs().to_vec());
                        }
                    }
                    // via DDF + extraction, embedding lower-degree roots
                    let loc = distinct_degree_locate(&f, e).unwrap();
                    let mut got = BTreeSet::new();
                    for (&d, fd) in &loc.factors_per_degree {
                        if e % d != 0 {
                            continue;
                        }
                        if d == e {
                            for r in roots_in_field(fd, &ext, &mut rng).unwrap() {
                                got.insert(r.coeffs().to_vec());
                            }
                        } else if d == 1 {
                            for r in roots_in_field(fd, &base, &mut rng).unwrap() {
                                let mut v = vec![0u128; e];
                                v[0] = r.coeffs()[0];
                                got.insert(v);
                            }
                        } else {
                            // d strictly between 1 and e with d | e: find the
                            // orbit inside ext directly
                            let raw = fd.base_coeff_vec().unwrap();
                            for u in equal_degree_split(&base, &raw, d, 64, &mut rng).unwrap() {
                                let rs =
                                    ext_ops::roots_of_irreducible(&ext, &u, 64, &mut rng).unwrap();
                                for r in rs {
                                    got.insert(r.coeffs().to_vec());
                                }
                            }
                        }
                    }
                    assert_eq!(got, expected, "p={} e={}", p, e);
                }
            }
        }
    }

    #[test]
    fn ddf_conservation() {
        // located roots + unlocated remainder degree = deg f
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        let pf = PrimeField::small_field_ok(11).unwrap();
        let base = ExtensionField::base_field(pf);
        for _ in 0..100 {
            let deg = 2 + (rng.gen::<u64>() % 8) as usize;
            let mut raw = base_ops::random_poly(&pf, deg, &mut rng);
            raw.resize(deg, 0);
            raw.push(1);
            let der = base_ops::derivative(&pf, &raw);
            if base_ops::gcd(&pf, &raw, &der).len() != 1 {
                continue;
            }
            let f = Polynomial::from_raw_base(&base, raw);
            let cap = 1 + (rng.gen::<u64>() % 6) as usize;
            let loc = distinct_degree_locate(&f, cap).unwrap();
            assert_eq!(
                loc.located_root_total() + loc.unlocated_degree(),
                deg,
                "cap={}",
                cap
            );
        }
    }

    #[test]
    fn frobenius_consistency() {
        // gcd(frobenius_power(f, e) - x, f) degree counts roots in F_{p^e}
        let mut rng = ChaCha8Rng::seed_from_u64(37);
        let pf = PrimeField::small_field_ok(7).unwrap();
        let base = ExtensionField::base_field(pf);
        for _ in 0..50 {
            let deg = 2 + (rng.gen::<u64>() % 5) as usize;
            let mut raw = base_ops::random_poly(&pf, deg, &mut rng);
            raw.resize(deg, 0);
            raw.push(1);
            let der = base_ops::derivative(&pf, &raw);
            if base_ops::gcd(&pf, &raw, &der).len() != 1 {
                continue;
            }
            let f = Polynomial::from_raw_base(&base, raw.clone());
            for e in 1..=3usize {
                let fp = frobenius_power(&f, e).unwrap();
                let mut diff = base_ops::sub(&pf, &fp.raw_base(), &[0, 1]);
                base_ops::trim(&mut diff);
                let gcd_degree = if diff.is_empty() {
                    f.degree().unwrap()
                } else {
                    base_ops::gcd(&pf, &diff, &f.raw_base()).len() - 1
                };
                // oracle: count roots by scanning F_{p^e}
                let ext = ExtensionField::random(pf, e, &mut rng).unwrap();
                let mut count = 0;
                let total = 7u64.pow(e as u32);
                for idx in 0..total {
                    let mut rem = idx;
                    let mut coeffs = vec![0u128; e];
                    for c in coeffs.iter_mut() {
                        *c = (rem % 7) as u128;
                        rem /= 7;
                    }
                    let xel = ext.element(coeffs).unwrap();
                    if evaluate(&f, &xel).unwrap().is_zero() {
                        count += 1;
                    }
                }
                assert_eq!(gcd_degree, count, "e={}", e);
            }
        }
    }

    #[test]
    fn minimal_polynomial_of_generator_is_modulus() {
        let ext = f49();
        let m = minimal_polynomial(&ext.generator());
        assert_eq!(m.base_coeff_vec().unwrap(), vec![1, 0, 1]);
        // and for a base element: x - a
        let base = f7();
        let a = base.constant(3).unwrap();
        assert_eq!(minimal_polynomial(&a).base_coeff_vec().unwrap(), vec![4, 1]);
    }
}
