//! The block reconciliation protocol.
//!
//! Alice pins a polynomial of degree `r + 1` through the anchor pairs
//! `(z1, 0), (z2, 1)` and `r` randomly chosen support pairs, then solves
//! `f(x) = b` for every remaining position so that each position's abscissa
//! is a root of `f - b`. The broadcast consists only of abscissas; bit values
//! never leave the parties. Bob reinterpolates from any `r` positions he
//! trusts plus the anchors, and accepts once held-out points land on the
//! curve and every other abscissa evaluates to a bit.
//!
//! Roots beyond the base field live in extension fields `F_{p^d}`; Alice
//! transmits the modulus she used for every degree so both sides compute in
//! identical representations. Bob's retry subsets stay within one extension
//! degree at a time (base-field points embed anywhere), trading the paper's
//! compositum arithmetic for a measured, reported deviation.

mod message;

pub use message::{
    decode_message, decode_messages, encode_message, encode_messages, BroadcastMessage,
    MessageError, TaggedElement, MESSAGE_FORMAT_VERSION,
};

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use thiserror::Error;

use crate::ff::{ExtensionField, FfError, PrimeField, DEFAULT_PROTOCOL_PRIME};
use crate::poly::{
    self, base_ops, newton_interpolate, BaseArith, ExtArith, PolyError, Polynomial,
};
use crate::seeds;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProtocolError {
    #[error("bit value {value} occurs {count} times, more than r = {r}: no polynomial of degree r+1 can host that many roots")]
    InfeasibleBlock { value: u8, count: usize, r: usize },
    #[error("encoder gave up after {0} resampling attempts")]
    EncodeBudgetExhausted(u32),
    #[error("key lengths disagree or do not split into {m} blocks of {s} bits")]
    LengthMismatch { m: usize, s: usize },
    #[error("bits must be 0 or 1")]
    BitsNotBinary,
    #[error("block length {got} does not match s = {want}")]
    WrongBlockLength { got: usize, want: usize },
    #[error("invalid parameters: {0}")]
    BadParams(String),
    #[error("malformed message: {0}")]
    MalformedMessage(#[from] MessageError),
    #[error(transparent)]
    Field(#[from] FfError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

// ---------------------------------------------------------------------------
// Parameters
// ---------------------------------------------------------------------------

/// Protocol knobs for one block size.
#[derive(Debug, Clone, Serialize)]
pub struct BlockParams {
    /// prime modulus
    pub p: u128,
    /// block length in bits
    pub s: usize,
    /// interpolation-support size; the polynomial degree is r + 1
    pub r: usize,
    /// error-toleration rate the deployment assumes (informational; `r`
    /// stays independently configurable)
    pub gamma: f64,
    /// cap on root extension degrees
    pub max_ext_degree: usize,
    /// Alice's resampling budget
    pub alice_max_attempts: u32,
    /// Bob's subset-retry budget
    pub bob_max_attempts: u64,
    /// held-out points in Bob's degree test
    pub validation_extra: usize,
    /// random split attempts per factor in root extraction
    pub split_budget: u32,
    /// allow primes below the 10^20 protocol floor
    pub small_field_ok: bool,
}

impl Default for BlockParams {
    fn default() -> Self {
        let s = 100;
        let gamma = 0.30;
        BlockParams {
            p: DEFAULT_PROTOCOL_PRIME,
            s,
            r: default_r(s, gamma),
            gamma,
            max_ext_degree: 24,
            alice_max_attempts: 200,
            bob_max_attempts: 1000,
            validation_extra: 1,
            split_budget: poly::DEFAULT_SPLIT_BUDGET,
            small_field_ok: false,
        }
    }
}

/// `r = floor(s - s * gamma)`.
pub fn default_r(s: usize, gamma: f64) -> usize {
    (s as f64 - s as f64 * gamma).floor() as usize
}

impl BlockParams {
    pub fn validate(&self) -> Result<PrimeField, ProtocolError> {
        let prime = if self.small_field_ok {
            PrimeField::small_field_ok(self.p)
        } else {
            PrimeField::new(self.p)
        }?;
        if self.r < 1 || self.r + 1 > self.s {
            return Err(ProtocolError::BadParams(format!(
                "need 1 <= r <= s - 1, got r = {}, s = {}",
                self.r, self.s
            )));
        }
        // each bit value supplies at most r + 1 roots and one anchor eats
        // one of them, so more than 2(r+1) solved positions can never work
        if self.s - (self.r + 1) > 2 * (self.r + 1) {
            return Err(ProtocolError::BadParams(format!(
                "s - (r+1) = {} exceeds the root budget 2(r+1) = {}",
                self.s - (self.r + 1),
                2 * (self.r + 1)
            )));
        }
        if !(0.0..=1.0).contains(&self.gamma) {
            return Err(ProtocolError::BadParams("gamma outside [0, 1]".into()));
        }
        if self.max_ext_degree < 1 {
            return Err(ProtocolError::BadParams("max_ext_degree >= 1".into()));
        }
        if self.validation_extra < 1 || self.r + self.validation_extra > self.s {
            return Err(ProtocolError::BadParams(
                "need 1 <= validation_extra <= s - r".into(),
            ));
        }
        if self.alice_max_attempts == 0 || self.bob_max_attempts == 0 || self.split_budget == 0 {
            return Err(ProtocolError::BadParams("attempt budgets must be positive".into()));
        }
        if (self.s as u128) + 2 > self.p {
            return Err(ProtocolError::BadParams(
                "p must exceed s + 2 to host distinct abscissas".into(),
            ));
        }
        Ok(prime)
    }
}

// ---------------------------------------------------------------------------
// Outcomes
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum FailureReason {
    /// every retry failed the degree test
    RetriesExhausted,
    /// no single-degree position pool was large enough to try
    NoEligibleClass,
    /// a bit value occurs more than r times; no encoding exists
    EncodeInfeasible,
    /// Alice ran out of resampling attempts (root shortage)
    EncodeBudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum BlockStatus {
    Accepted {
        /// corrected block, bit-identical to Alice's on success
        bits: Vec<u8>,
        /// positions whose input bit was replaced
        corrections: Vec<usize>,
        /// extension degree of the accepted attempt (1 = base field)
        degree_used: usize,
    },
    Failed { reason: FailureReason },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockOutcome {
    pub status: BlockStatus,
    pub attempts: u64,
}

impl BlockOutcome {
    pub fn is_accepted(&self) -> bool {
        matches!(self.status, BlockStatus::Accepted { .. })
    }

    pub fn corrected_bits(&self) -> Option<&[u8]> {
        match &self.status {
            BlockStatus::Accepted { bits, .. } => Some(bits),
            BlockStatus::Failed { .. } => None,
        }
    }
}

/// Per-session aggregate: the frame succeeds only if every block does.
#[derive(Debug, Clone, Serialize)]
pub struct SessionReport {
    pub outcomes: Vec<BlockOutcome>,
    pub frame_success: bool,
    /// concatenated corrected key when the frame succeeded
    pub reconciled_key: Option<Vec<u8>>,
}

// ---------------------------------------------------------------------------
// Alice
// ---------------------------------------------------------------------------

fn check_bits(bits: &[u8]) -> Result<(), ProtocolError> {
    if bits.iter().any(|&b| b > 1) {
        return Err(ProtocolError::BitsNotBinary);
    }
    Ok(())
}

/// Alice's block encoder. Returns the broadcast message and the secret
/// polynomial (degree r + 1, never transmitted).
pub fn alice_encode_block<R: Rng + ?Sized>(
    bits: &[u8],
    params: &BlockParams,
    rng: &mut R,
) -> Result<(BroadcastMessage, Polynomial), ProtocolError> {
    let prime = params.validate()?;
    check_bits(bits)?;
    if bits.len() != params.s {
        return Err(ProtocolError::WrongBlockLength {
            got: bits.len(),
            want: params.s,
        });
    }
    let (s, r) = (params.s, params.r);
    for value in [0u8, 1] {
        let count = bits.iter().filter(|&&b| b == value).count();
        if count > r {
            return Err(ProtocolError::InfeasibleBlock { value, count, r });
        }
    }
    let base = ExtensionField::base_field(prime);
    let ar = BaseArith(prime);

    for _attempt in 0..params.alice_max_attempts {
        // anchors and support are sampled before looking at the bits, so the
        // free/solved split carries no bit information
        let z1 = prime.sample(rng);
        let z2 = loop {
            let c = prime.sample(rng);
            if c != z1 {
                break c;
            }
        };
        let mut delta: Vec<usize> = (0..s).collect();
        delta.shuffle(rng);
        let support = &delta[..r];
        let solved = &delta[r..];
        let mut used: BTreeSet<u128> = BTreeSet::from([z1, z2]);
        let mut support_x = Vec::with_capacity(r);
        for _ in 0..r {
            let x = loop {
                let c = prime.sample(rng);
                if used.insert(c) {
                    break c;
                }
            };
            support_x.push(x);
        }

        // interpolate through the anchors and support pairs
        let mut xs: Vec<u128> = vec![z1, z2];
        let mut ys: Vec<u128> = vec![0, 1];
        for (&pos, &x) in support.iter().zip(&support_x) {
            xs.push(x);
            ys.push(bits[pos] as u128);
        }
        let f = newton_interpolate(&ar, &xs, &ys)?;
        if f.len() != r + 2 {
            continue; // degree below r + 1: resample
        }
        let deriv = base_ops::derivative(&prime, &f);
        let f_minus_1 = base_ops::sub(&prime, &f, &[1]);
        if base_ops::gcd(&prime, &f, &deriv).len() != 1
            || base_ops::gcd(&prime, &f_minus_1, &deriv).len() != 1
        {
            continue; // repeated roots: resample
        }

        match assign_roots(
            &prime, &base, &f, bits, support, &support_x, solved, z1, z2, params, rng,
        )? {
            Some((xs_tagged, moduli)) => {
                let msg = BroadcastMessage {
                    version: MESSAGE_FORMAT_VERSION,
                    block_index: 0,
                    p: params.p,
                    s,
                    r,
                    z1,
                    z2,
                    moduli,
                    xs: xs_tagged,
                };
                msg.validate()?;
                let poly = Polynomial::from_base_coeffs(&base, &f)?;
                verify_encoding(&poly, &msg, bits, z1, z2)?;
                return Ok((msg, poly));
            }
            None => continue, // root shortage: resample everything
        }
    }
    Err(ProtocolError::EncodeBudgetExhausted(
        params.alice_max_attempts,
    ))
}

/// Locates and assigns roots of `f - b` to the solved positions. Returns
/// `None` on root shortage (the caller resamples).
#[allow(clippy::too_many_arguments)]
fn assign_roots<R: Rng + ?Sized>(
    prime: &PrimeField,
    base: &ExtensionField,
    f: &[u128],
    bits: &[u8],
    support: &[usize],
    support_x: &[u128],
    solved: &[usize],
    z1: u128,
    z2: u128,
    params: &BlockParams,
    rng: &mut R,
) -> Result<Option<(Vec<TaggedElement>, BTreeMap<usize, Vec<u128>>)>, ProtocolError> {
    // strip the roots already consumed by the anchor and support pairs
    let mut located = Vec::new(); // per bit value: DDF of the residual factor
    for value in [0u8, 1] {
        let mut g = base_ops::sub(prime, f, &[value as u128]);
        let anchor = if value == 0 { z1 } else { z2 };
        g = base_ops::exact_div(prime, &g, &[prime.neg(anchor), 1]);
        for (&pos, &x) in support.iter().zip(support_x) {
            if bits[pos] == value {
                g = base_ops::exact_div(prime, &g, &[prime.neg(x), 1]);
            }
        }
        let g = base_ops::monic(prime, &g);
        let need = solved.iter().filter(|&&pos| bits[pos] == value).count();
        if g.len() <= 1 && need > 0 {
            return Ok(None);
        }
        let location = if g.len() > 1 {
            Some(poly::distinct_degree_locate(
                &Polynomial::from_base_coeffs(base, &g)?,
                params.max_ext_degree,
            )?)
        } else {
            None
        };
        let available: usize = location
            .as_ref()
            .map(|loc| loc.located_root_total())
            .unwrap_or(0);
        if available < need {
            return Ok(None); // shortage is a resampling event, not an error
        }
        located.push((value, need, location));
    }

    // extract roots lowest degree first, sharing one field per degree
    let mut fields: BTreeMap<usize, ExtensionField> = BTreeMap::new();
    let mut taken: [Vec<TaggedElement>; 2] = [Vec::new(), Vec::new()];
    let degrees: BTreeSet<usize> = located
        .iter()
        .filter_map(|(_, _, loc)| loc.as_ref())
        .flat_map(|loc| loc.roots_per_degree.keys().copied())
        .collect();
    for &d in &degrees {
        let all_filled = located
            .iter()
            .all(|(value, need, _)| taken[*value as usize].len() >= *need);
        if all_filled {
            break;
        }
        for (value, need, location) in &located {
            let vi = *value as usize;
            let still = need.saturating_sub(taken[vi].len());
            if still == 0 {
                continue;
            }
            let Some(loc) = location else { continue };
            let Some(fd) = loc.factors_per_degree.get(&d) else {
                continue;
            };
            let field = match fields.get(&d) {
                Some(f) => f.clone(),
                None => {
                    let f = if d == 1 {
                        base.clone()
                    } else {
                        ExtensionField::random(*prime, d, rng)?
                    };
                    fields.insert(d, f.clone());
                    f
                }
            };
            let mut roots =
                poly::roots_in_field_with_budget(fd, &field, params.split_budget, rng)?;
            roots.shuffle(rng);
            for root in roots.into_iter().take(still) {
                taken[vi].push(TaggedElement {
                    degree: d,
                    coeffs: if d == 1 {
                        vec![root.coeffs()[0]]
                    } else {
                        root.coeffs().to_vec()
                    },
                });
            }
        }
    }
    for (value, need, _) in &located {
        if taken[*value as usize].len() < *need {
            return Ok(None);
        }
    }

    // uniform assignment of the taken roots to positions, per value
    let mut assignment: BTreeMap<usize, TaggedElement> = BTreeMap::new();
    for value in [0usize, 1] {
        taken[value].shuffle(rng);
        let mut queue = taken[value].drain(..);
        for &pos in solved.iter().filter(|&&pos| bits[pos] as usize == value) {
            assignment.insert(pos, queue.next().expect("enough roots taken"));
        }
    }
    let mut used_degrees: BTreeSet<usize> = BTreeSet::new();
    let mut xs_tagged = Vec::with_capacity(bits.len());
    for pos in 0..bits.len() {
        if let Some(i) = support.iter().position(|&sp| sp == pos) {
            xs_tagged.push(TaggedElement::base(support_x[i]));
        } else {
            let el = assignment.remove(&pos).expect("assigned");
            used_degrees.insert(el.degree);
            xs_tagged.push(el);
        }
    }
    let moduli: BTreeMap<usize, Vec<u128>> = fields
        .iter()
        .filter(|(d, _)| **d > 1 && used_degrees.contains(d))
        .map(|(&d, f)| (d, f.modulus_coeffs().to_vec()))
        .collect();
    Ok(Some((xs_tagged, moduli)))
}

/// Post-encode sanity: the polynomial really passes through every broadcast
/// pair and all abscissas are distinct.
fn verify_encoding(
    f: &Polynomial,
    msg: &BroadcastMessage,
    bits: &[u8],
    z1: u128,
    z2: u128,
) -> Result<(), ProtocolError> {
    let base = f.field().clone();
    let prime = *base.base();
    if f.degree() != Some(msg.r + 1) {
        return Err(ProtocolError::BadParams("degree drifted".into()));
    }
    let at = |x: u128| base_ops::eval(&prime, &f.base_coeff_vec().expect("base poly"), x);
    if at(z1) != 0 || at(z2) != 1 {
        return Err(ProtocolError::BadParams("anchor value drifted".into()));
    }
    let mut fields: BTreeMap<usize, ExtensionField> = BTreeMap::new();
    for (&d, m) in &msg.moduli {
        fields.insert(d, ExtensionField::with_modulus(prime, m.clone())?);
    }
    for (pos, x) in msg.xs.iter().enumerate() {
        let want = bits[pos] as u128;
        if x.degree == 1 {
            if at(x.coeffs[0]) != want {
                return Err(ProtocolError::BadParams("support value drifted".into()));
            }
        } else {
            let field = fields.get(&x.degree).expect("validated modulus");
            let xe = field.element(x.coeffs.clone())?;
            let val = poly::evaluate(f, &xe)?;
            let expect = field.constant(want)?;
            if val != expect {
                return Err(ProtocolError::BadParams("root value drifted".into()));
            }
        }
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Bob
// ---------------------------------------------------------------------------

struct BobContext {
    prime: PrimeField,
    fields: BTreeMap<usize, ExtensionField>,
    /// candidate degree classes: (degree, positions usable at that degree)
    classes: Vec<(usize, Vec<usize>)>,
}

fn build_bob_context(
    msg: &BroadcastMessage,
    params: &BlockParams,
) -> Result<BobContext, ProtocolError> {
    msg.validate()?;
    let prime = if params.small_field_ok {
        PrimeField::small_field_ok(msg.p)
    } else {
        PrimeField::new(msg.p)
    }?;
    let mut fields = BTreeMap::new();
    for (&d, m) in &msg.moduli {
        fields.insert(d, ExtensionField::with_modulus(prime, m.clone())?);
    }
    let mut base_positions = Vec::new();
    let mut ext_positions: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, x) in msg.xs.iter().enumerate() {
        if x.degree == 1 {
            base_positions.push(i);
        } else {
            ext_positions.entry(x.degree).or_default().push(i);
        }
    }
    // base-field points embed into any single extension degree, so each
    // class is the base pool plus one degree's pool
    let need = msg.r + params.validation_extra;
    let mut classes = Vec::new();
    if ext_positions.is_empty() {
        if base_positions.len() >= need {
            classes.push((1, base_positions));
        }
    } else {
        for (&d, pool) in &ext_positions {
            let mut class = base_positions.clone();
            class.extend_from_slice(pool);
            if class.len() >= need {
                classes.push((d, class));
            }
        }
        if base_positions.len() >= need {
            classes.push((1, base_positions));
        }
    }
    Ok(BobContext {
        prime,
        fields,
        classes,
    })
}

/// Bob's block reconciler: retry random single-degree subsets until the
/// degree test accepts, then replace mismatching bits with curve values.
pub fn bob_reconcile_block<R: Rng + ?Sized>(
    bits: &[u8],
    msg: &BroadcastMessage,
    params: &BlockParams,
    rng: &mut R,
) -> Result<BlockOutcome, ProtocolError> {
    check_bits(bits)?;
    if bits.len() != msg.s {
        return Err(ProtocolError::WrongBlockLength {
            got: bits.len(),
            want: msg.s,
        });
    }
    let ctx = build_bob_context(msg, params)?;
    if ctx.classes.is_empty() {
        return Ok(BlockOutcome {
            status: BlockStatus::Failed {
                reason: FailureReason::NoEligibleClass,
            },
            attempts: 0,
        });
    }
    let subset_size = msg.r + params.validation_extra;
    for attempt in 1..=params.bob_max_attempts {
        let (degree, class) = &ctx.classes[rng.gen_range(0..ctx.classes.len())];
        let picks = rand::seq::index::sample(rng, class.len(), subset_size);
        let subset: Vec<usize> = picks.iter().map(|i| class[i]).collect();
        let (interp_positions, heldout) = subset.split_at(msg.r);
        if let Some(accepted) =
            try_subset(bits, msg, &ctx, *degree, interp_positions, heldout)?
        {
            let (out_bits, corrections) = accepted;
            return Ok(BlockOutcome {
                status: BlockStatus::Accepted {
                    bits: out_bits,
                    corrections,
                    degree_used: *degree,
                },
                attempts: attempt,
            });
        }
    }
    Ok(BlockOutcome {
        status: BlockStatus::Failed {
            reason: FailureReason::RetriesExhausted,
        },
        attempts: params.bob_max_attempts,
    })
}

/// One degree-test attempt. Returns the corrected block if the interpolant
/// has degree exactly r + 1, descends to base coefficients, matches every
/// held-out pair and maps every remaining abscissa into {0, 1}.
fn try_subset(
    bits: &[u8],
    msg: &BroadcastMessage,
    ctx: &BobContext,
    degree: usize,
    interp_positions: &[usize],
    heldout: &[usize],
) -> Result<Option<(Vec<u8>, Vec<usize>)>, ProtocolError> {
    let prime = ctx.prime;
    let coeffs: Vec<u128> = if degree == 1 {
        let ar = BaseArith(prime);
        let mut xs: Vec<u128> = Vec::with_capacity(msg.r + 2);
        let mut ys: Vec<u128> = Vec::with_capacity(msg.r + 2);
        xs.push(msg.z1);
        ys.push(0);
        xs.push(msg.z2);
        ys.push(1);
        for &pos in interp_positions {
            xs.push(msg.xs[pos].coeffs[0]);
            ys.push(bits[pos] as u128);
        }
        let f = newton_interpolate(&ar, &xs, &ys)?;
        if f.len() != msg.r + 2 {
            return Ok(None);
        }
        f
    } else {
        let field = ctx.fields.get(&degree).expect("validated modulus");
        let ar = ExtArith(field.clone());
        let lift = |v: u128| {
            let mut c = vec![0u128; field.degree()];
            c[0] = v;
            c
        };
        let mut xs: Vec<Vec<u128>> = Vec::with_capacity(msg.r + 2);
        let mut ys: Vec<Vec<u128>> = Vec::with_capacity(msg.r + 2);
        xs.push(lift(msg.z1));
        ys.push(lift(0));
        xs.push(lift(msg.z2));
        ys.push(lift(1));
        for &pos in interp_positions {
            let x = &msg.xs[pos];
            xs.push(if x.degree == 1 {
                lift(x.coeffs[0])
            } else {
                x.coeffs.clone()
            });
            ys.push(lift(bits[pos] as u128));
        }
        let f = newton_interpolate(&ar, &xs, &ys)?;
        if f.len() != msg.r + 2 {
            return Ok(None);
        }
        // Alice's polynomial has base-field coefficients; anything else is
        // a wrong-subset artifact
        if f.iter().any(|c| c[1..].iter().any(|&x| x != 0)) {
            return Ok(None);
        }
        f.iter().map(|c| c[0]).collect()
    };

    // evaluate a base-coefficient polynomial at any tagged abscissa
    let value_at = |x: &TaggedElement| -> Option<u128> {
        if x.degree == 1 {
            Some(base_ops::eval(&prime, &coeffs, x.coeffs[0]))
        } else {
            let field = ctx.fields.get(&x.degree)?;
            let mut acc = vec![0u128; field.degree()];
            for &c in coeffs.iter().rev() {
                acc = field.mul_raw(&acc, &x.coeffs);
                acc[0] = prime.add(acc[0], c);
            }
            if acc[1..].iter().all(|&c| c == 0) {
                Some(acc[0])
            } else {
                None
            }
        }
    };

    for &pos in heldout {
        match value_at(&msg.xs[pos]) {
            Some(v) if v == bits[pos] as u128 => {}
            _ => return Ok(None),
        }
    }
    let in_subset: BTreeSet<usize> = interp_positions
        .iter()
        .chain(heldout)
        .copied()
        .collect();
    let mut out = bits.to_vec();
    let mut corrections = Vec::new();
    for pos in 0..msg.s {
        if in_subset.contains(&pos) {
            continue;
        }
        match value_at(&msg.xs[pos]) {
            Some(v) if v <= 1 => {
                let v = v as u8;
                if v != bits[pos] {
                    out[pos] = v;
                    corrections.push(pos);
                }
            }
            _ => return Ok(None),
        }
    }
    Ok(Some((out, corrections)))
}

// ---------------------------------------------------------------------------
// Session
// ---------------------------------------------------------------------------

/// Runs the protocol block by block over both keys. Per-block RNG streams
/// are derived from `(master_seed, block index)`, so serial and parallel
/// schedules produce identical outcomes.
pub fn run_session(
    key_a: &[u8],
    key_b: &[u8],
    m: usize,
    params: &BlockParams,
    master_seed: u64,
) -> Result<SessionReport, ProtocolError> {
    if key_a.len() != key_b.len() || m == 0 || key_a.len() != m * params.s {
        return Err(ProtocolError::LengthMismatch { m, s: params.s });
    }
    check_bits(key_a)?;
    check_bits(key_b)?;
    let mut outcomes = Vec::with_capacity(m);
    for block in 0..m {
        let lo = block * params.s;
        let hi = lo + params.s;
        let mut alice_rng = seeds::derive_rng(master_seed, "alice", block as u64);
        let outcome = match alice_encode_block(&key_a[lo..hi], params, &mut alice_rng) {
            Ok((msg, _f)) => {
                let mut bob_rng = seeds::derive_rng(master_seed, "bob", block as u64);
                bob_reconcile_block(&key_b[lo..hi], &msg, params, &mut bob_rng)?
            }
            Err(ProtocolError::InfeasibleBlock { .. }) => BlockOutcome {
                status: BlockStatus::Failed {
                    reason: FailureReason::EncodeInfeasible,
                },
                attempts: 0,
            },
            Err(ProtocolError::EncodeBudgetExhausted(n)) => BlockOutcome {
                status: BlockStatus::Failed {
                    reason: FailureReason::EncodeBudgetExhausted,
                },
                attempts: n as u64,
            },
            Err(e) => return Err(e),
        };
        outcomes.push(outcome);
    }
    let frame_success = outcomes.iter().all(BlockOutcome::is_accepted);
    let reconciled_key = if frame_success {
        let mut key = Vec::with_capacity(key_a.len());
        for o in &outcomes {
            key.extend_from_slice(o.corrected_bits().expect("accepted"));
        }
        Some(key)
    } else {
        None
    };
    Ok(SessionReport {
        outcomes,
        frame_success,
        reconciled_key,
    })
}
