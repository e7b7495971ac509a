//! Newton divided-difference interpolation, generic over the coefficient
//! field so the base-field fast path (`u128` residues) and the extension
//! path (coefficient vectors) share one implementation.
//!
//! All divided-difference denominators are known up front from the
//! abscissas, so they are inverted in a single batch (Montgomery's trick):
//! one field inversion plus three multiplications per denominator.

use crate::ff::{ExtensionField, FfError, PrimeField};

use super::PolyError;

pub(crate) trait Arith {
    type El: Clone + PartialEq;
    fn zero(&self) -> Self::El;
    fn one(&self) -> Self::El;
    fn is_zero(&self, a: &Self::El) -> bool;
    fn add(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn sub(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn mul(&self, a: &Self::El, b: &Self::El) -> Self::El;
    fn inv(&self, a: &Self::El) -> Result<Self::El, FfError>;
}

pub(crate) struct BaseArith(pub PrimeField);

impl Arith for BaseArith {
    type El = u128;
    fn zero(&self) -> u128 {
        0
    }
    fn one(&self) -> u128 {
        1
    }
    fn is_zero(&self, a: &u128) -> bool {
        *a == 0
    }
    fn add(&self, a: &u128, b: &u128) -> u128 {
        self.0.add(*a, *b)
    }
    fn sub(&self, a: &u128, b: &u128) -> u128 {
        self.0.sub(*a, *b)
    }
    fn mul(&self, a: &u128, b: &u128) -> u128 {
        self.0.mul(*a, *b)
    }
    fn inv(&self, a: &u128) -> Result<u128, FfError> {
        self.0.inv(*a)
    }
}

pub(crate) struct ExtArith(pub ExtensionField);

impl Arith for ExtArith {
    type El = Vec<u128>;
    fn zero(&self) -> Vec<u128> {
        vec![0; self.0.degree()]
    }
    fn one(&self) -> Vec<u128> {
        let mut v = vec![0; self.0.degree()];
        v[0] = 1;
        v
    }
    fn is_zero(&self, a: &Vec<u128>) -> bool {
        a.iter().all(|&c| c == 0)
    }
    fn add(&self, a: &Vec<u128>, b: &Vec<u128>) -> Vec<u128> {
        self.0.add_raw(a, b)
    }
    fn sub(&self, a: &Vec<u128>, b: &Vec<u128>) -> Vec<u128> {
        self.0.sub_raw(a, b)
    }
    fn mul(&self, a: &Vec<u128>, b: &Vec<u128>) -> Vec<u128> {
        self.0.mul_raw(a, b)
    }
    fn inv(&self, a: &Vec<u128>) -> Result<Vec<u128>, FfError> {
        self.0.inv_raw(a)
    }
}

/// Inverts every element of `vals` with one field inversion. Fails with
/// `DuplicateAbscissa` if any element is zero (the only caller feeds it
/// abscissa differences).
fn batch_invert<A: Arith>(ar: &A, vals: &[A::El]) -> Result<Vec<A::El>, PolyError> {
    if vals.is_empty() {
        return Ok(Vec::new());
    }
    let mut prefix = Vec::with_capacity(vals.len());
    let mut acc = ar.one();
    for v in vals {
        if ar.is_zero(v) {
            return Err(PolyError::DuplicateAbscissa);
        }
        acc = ar.mul(&acc, v);
        prefix.push(acc.clone());
    }
    let mut inv_acc = ar
        .inv(&acc)
        .map_err(|_| PolyError::DuplicateAbscissa)?;
    let mut out = vec![ar.zero(); vals.len()];
    for i in (0..vals.len()).rev() {
        if i == 0 {
            out[0] = inv_acc.clone();
        } else {
            out[i] = ar.mul(&inv_acc, &prefix[i - 1]);
            inv_acc = ar.mul(&inv_acc, &vals[i]);
        }
    }
    Ok(out)
}

/// Newton interpolation through `(xs[i], ys[i])`; returns monomial-basis
/// coefficients, low to high, with trailing zeros removed.
pub(crate) fn newton_interpolate<A: Arith>(
    ar: &A,
    xs: &[A::El],
    ys: &[A::El],
) -> Result<Vec<A::El>, PolyError> {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len();
    if n == 0 {
        return Err(PolyError::EmptyPoints);
    }
    // denominators x_i - x_{i-j}, in the order the table walk consumes them
    let mut denoms = Vec::with_capacity(n * (n - 1) / 2);
    for j in 1..n {
        for i in (j..n).rev() {
            denoms.push(ar.sub(&xs[i], &xs[i - j]));
        }
    }
    let denom_invs = batch_invert(ar, &denoms)?;
    let mut table: Vec<A::El> = ys.to_vec();
    let mut k = 0;
    for j in 1..n {
        for i in (j..n).rev() {
            let num = ar.sub(&table[i], &table[i - 1]);
            table[i] = ar.mul(&num, &denom_invs[k]);
            k += 1;
        }
    }
    // expand Newton form to monomial coefficients:
    // p(x) = dd_0 + (x - x_0)(dd_1 + (x - x_1)(...))
    let mut coeffs: Vec<A::El> = vec![table[n - 1].clone()];
    for i in (0..n - 1).rev() {
        // coeffs = coeffs * (x - x_i) + dd_i
        let mut next = vec![ar.zero(); coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            next[k + 1] = ar.add(&next[k + 1], c);
            let t = ar.mul(c, &xs[i]);
            next[k] = ar.sub(&next[k], &t);
        }
        next[0] = ar.add(&next[0], &table[i]);
        coeffs = next;
    }
    while coeffs.len() > 1 && ar.is_zero(coeffs.last().unwrap()) {
        coeffs.pop();
    }
    if coeffs.len() == 1 && ar.is_zero(&coeffs[0]) {
        coeffs.clear();
    }
    Ok(coeffs)
}

/// Horner evaluation in the same element domain.
pub(crate) fn horner<A: Arith>(ar: &A, coeffs: &[A::El], x: &A::El) -> A::El {
    let mut acc = ar.zero();
    for c in coeffs.iter().rev() {
        acc = ar.mul(&acc, x);
        acc = ar.add(&acc, c);
    }
    acc
}
