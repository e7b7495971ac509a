//! Broadcast message wire format.
//!
//! A reconciliation run broadcasts, per block, the anchors, every position's
//! abscissa and the extension moduli those abscissas live under. The format
//! is a line-oriented text document with decimal coefficient lists, so it is
//! platform-independent and byte-stable: moduli are sorted by degree,
//! abscissas by position, and encoding is deterministic.
//!
//! ```text
//! polyrec-message v1
//! blocks <m>
//! block <idx>
//! p <decimal>
//! s <n>
//! r <n>
//! z1 <decimal>
//! z2 <decimal>
//! modulus <degree> <c0,c1,...,1>
//! x <position> <degree> <c0,...>
//! end
//! ```

use std::collections::BTreeMap;

use thiserror::Error;

use crate::ff::{ExtensionField, PrimeField};

pub const MESSAGE_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MessageError {
    #[error("parse error at line {line}: {what}")]
    Parse { line: usize, what: String },
    #[error("invariant violation: {0}")]
    Invariant(String),
}

fn parse_err<T>(line: usize, what: impl Into<String>) -> Result<T, MessageError> {
    Err(MessageError::Parse {
        line,
        what: what.into(),
    })
}

/// One broadcast abscissa: the extension degree of its minimal field and its
/// little-endian coefficients there (length = degree).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedElement {
    pub degree: usize,
    pub coeffs: Vec<u128>,
}

impl TaggedElement {
    pub fn base(value: u128) -> Self {
        TaggedElement {
            degree: 1,
            coeffs: vec![value],
        }
    }
}

/// The public reconciliation payload for one block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BroadcastMessage {
    pub version: u32,
    pub block_index: usize,
    pub p: u128,
    pub s: usize,
    pub r: usize,
    pub z1: u128,
    pub z2: u128,
    /// extension degree -> monic irreducible modulus (little-endian,
    /// length degree + 1); only degrees used by some abscissa appear
    pub moduli: BTreeMap<usize, Vec<u128>>,
    /// index-aligned with block bit positions, length `s`
    pub xs: Vec<TaggedElement>,
}

impl BroadcastMessage {
    /// Checks every structural invariant. Field-theoretic checks (primality
    /// of `p`, irreducibility of each modulus) are included, so a tampered
    /// file cannot smuggle a reducible modulus past decoding.
    pub fn validate(&self) -> Result<(), MessageError> {
        if self.version != MESSAGE_FORMAT_VERSION {
            return Err(MessageError::Invariant(format!(
                "unsupported version {}",
                self.version
            )));
        }
        let prime = PrimeField::small_field_ok(self.p)
            .map_err(|_| MessageError::Invariant("p is prime".into()))?;
        if self.s < 2 {
            return Err(MessageError::Invariant("s >= 2".into()));
        }
        if self.r < 1 || self.r + 1 > self.s {
            return Err(MessageError::Invariant("1 <= r <= s - 1".into()));
        }
        if self.z1 >= self.p || self.z2 >= self.p {
            return Err(MessageError::Invariant(
                "anchor is a reduced residue".into(),
            ));
        }
        if self.z1 == self.z2 {
            return Err(MessageError::Invariant("z1 != z2".into()));
        }
        if self.xs.len() != self.s {
            return Err(MessageError::Invariant(format!(
                "xs length {} equals s = {}",
                self.xs.len(),
                self.s
            )));
        }
        for (&d, m) in &self.moduli {
            if d < 2 {
                return Err(MessageError::Invariant(
                    "modulus degrees start at 2".into(),
                ));
            }
            if m.len() != d + 1 {
                return Err(MessageError::Invariant(format!(
                    "modulus for degree {} has {} coefficients",
                    d,
                    m.len()
                )));
            }
            if ExtensionField::with_modulus(prime, m.clone()).is_err() {
                return Err(MessageError::Invariant(format!(
                    "reducible modulus at degree {}",
                    d
                )));
            }
        }
        let mut seen_degrees: BTreeMap<usize, bool> = BTreeMap::new();
        for (i, x) in self.xs.iter().enumerate() {
            if x.degree == 0 {
                return Err(MessageError::Invariant(format!(
                    "abscissa {} has degree 0",
                    i
                )));
            }
            if x.coeffs.len() != x.degree {
                return Err(MessageError::Invariant(format!(
                    "abscissa {} has {} coefficients for degree {}",
                    i,
                    x.coeffs.len(),
                    x.degree
                )));
            }
            if x.coeffs.iter().any(|&c| c >= self.p) {
                return Err(MessageError::Invariant(format!(
                    "abscissa {} coefficient out of range",
                    i
                )));
            }
            if x.degree > 1 {
                if !self.moduli.contains_key(&x.degree) {
                    return Err(MessageError::Invariant(format!(
                        "missing modulus for degree {}",
                        x.degree
                    )));
                }
                if x.coeffs[1..].iter().all(|&c| c == 0) {
                    return Err(MessageError::Invariant(format!(
                        "extension-tagged abscissa {} lies in the base field",
                        i
                    )));
                }
            }
            seen_degrees.insert(x.degree, true);
        }
        for &d in self.moduli.keys() {
            if !seen_degrees.contains_key(&d) {
                return Err(MessageError::Invariant(format!(
                    "modulus for degree {} is unused",
                    d
                )));
            }
        }
        // pairwise distinctness: different minimal degrees are automatically
        // distinct; within a degree compare componentwise (anchors join the
        // degree-1 pool)
        let mut pools: BTreeMap<usize, Vec<&[u128]>> = BTreeMap::new();
        let z1v = [self.z1];
        let z2v = [self.z2];
        pools.entry(1).or_default().push(&z1v);
        pools.entry(1).or_default().push(&z2v);
        for x in &self.xs {
            pools.entry(x.degree).or_default().push(&x.coeffs);
        }
        for (_, mut pool) in pools {
            pool.sort();
            for w in pool.windows(2) {
                if w[0] == w[1] {
                    return Err(MessageError::Invariant("duplicate abscissa".into()));
                }
            }
        }
        Ok(())
    }
}

fn coeff_list(cs: &[u128]) -> String {
    cs.iter()
        .map(|c| c.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

fn parse_coeffs(s: &str, line: usize) -> Result<Vec<u128>, MessageError> {
    s.split(',')
        .map(|tok| {
            tok.parse::<u128>()
                .map_err(|_| MessageError::Parse {
                    line,
                    what: format!("bad coefficient {:?}", tok),
                })
        })
        .collect()
}

/// Deterministic text encoding of a message sequence; `decode_messages` is
/// its inverse.
pub fn encode_messages(msgs: &[BroadcastMessage]) -> String {
    let mut out = String::new();
    out.push_str(&format!("polyrec-message v{}\n", MESSAGE_FORMAT_VERSION));
    out.push_str(&format!("blocks {}\n", msgs.len()));
    for m in msgs {
        out.push_str(&format!("block {}\n", m.block_index));
        out.push_str(&format!("p {}\n", m.p));
        out.push_str(&format!("s {}\n", m.s));
        out.push_str(&format!("r {}\n", m.r));
        out.push_str(&format!("z1 {}\n", m.z1));
        out.push_str(&format!("z2 {}\n", m.z2));
        for (d, coeffs) in &m.moduli {
            out.push_str(&format!("modulus {} {}\n", d, coeff_list(coeffs)));
        }
        for (i, x) in m.xs.iter().enumerate() {
            out.push_str(&format!("x {} {} {}\n", i, x.degree, coeff_list(&x.coeffs)));
        }
        out.push_str("end\n");
    }
    out
}

/// Single-message convenience wrapper around [`encode_messages`].
pub fn encode_message(msg: &BroadcastMessage) -> String {
    encode_messages(std::slice::from_ref(msg))
}

/// Parses and validates a message document.
pub fn decode_messages(text: &str) -> Result<Vec<BroadcastMessage>, MessageError> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim_end()));
    let (ln, header) = lines
        .next()
        .ok_or(MessageError::Parse {
            line: 1,
            what: "empty document".into(),
        })?;
    if header != format!("polyrec-message v{}", MESSAGE_FORMAT_VERSION) {
        return parse_err(ln, format!("bad header {:?}", header));
    }
    let (ln, blocks_line) = lines.next().ok_or(MessageError::Parse {
        line: 2,
        what: "missing blocks count".into(),
    })?;
    let count: usize = blocks_line
        .strip_prefix("blocks ")
        .and_then(|v| v.parse().ok())
        .ok_or(MessageError::Parse {
            line: ln,
            what: "expected `blocks <n>`".into(),
        })?;
    let mut msgs = Vec::with_capacity(count);
    for _ in 0..count {
        msgs.push(decode_one(&mut lines)?);
    }
    if let Some((ln, extra)) = lines.next() {
        if !extra.is_empty() {
            return parse_err(ln, format!("trailing content {:?}", extra));
        }
    }
    for m in &msgs {
        m.validate()?;
    }
    Ok(msgs)
}

/// Single-message convenience wrapper around [`decode_messages`].
pub fn decode_message(text: &str) -> Result<BroadcastMessage, MessageError> {
    let msgs = decode_messages(text)?;
    if msgs.len() != 1 {
        return Err(MessageError::Invariant(format!(
            "expected one block, found {}",
            msgs.len()
        )));
    }
    Ok(msgs.into_iter().next().unwrap())
}

fn decode_one<'a, I>(lines: &mut I) -> Result<BroadcastMessage, MessageError>
where
    I: Iterator<Item = (usize, &'a str)>,
{
    let mut block_index = None;
    let mut p = None;
    let mut s = None;
    let mut r = None;
    let mut z1 = None;
    let mut z2 = None;
    let mut moduli = BTreeMap::new();
    let mut xs: Vec<(usize, TaggedElement)> = Vec::new();
    let mut last_line = 0;
    loop {
        let Some((ln, line)) = lines.next() else {
            return parse_err(last_line + 1, "truncated message: missing `end`");
        };
        last_line = ln;
        if line == "end" {
            break;
        }
        let mut toks = line.split_whitespace();
        let key = toks.next().unwrap_or("");
        match key {
            "block" => {
                block_index = Some(parse_num::<usize>(toks.next(), ln)?);
            }
            "p" => {
                p = Some(parse_num::<u128>(toks.next(), ln)?);
            }
            "s" => {
                s = Some(parse_num::<usize>(toks.next(), ln)?);
            }
            "r" => {
                r = Some(parse_num::<usize>(toks.next(), ln)?);
            }
            "z1" => {
                z1 = Some(parse_num::<u128>(toks.next(), ln)?);
            }
            "z2" => {
                z2 = Some(parse_num::<u128>(toks.next(), ln)?);
            }
            "modulus" => {
                let d = parse_num::<usize>(toks.next(), ln)?;
                let coeffs = parse_coeffs(
                    toks.next().ok_or(MessageError::Parse {
                        line: ln,
                        what: "missing modulus coefficients".into(),
                    })?,
                    ln,
                )?;
                if moduli.insert(d, coeffs).is_some() {
                    return parse_err(ln, format!("duplicate modulus for degree {}", d));
                }
            }
            "x" => {
                let idx = parse_num::<usize>(toks.next(), ln)?;
                let d = parse_num::<usize>(toks.next(), ln)?;
                let coeffs = parse_coeffs(
                    toks.next().ok_or(MessageError::Parse {
                        line: ln,
                        what: "missing abscissa coefficients".into(),
                    })?,
                    ln,
                )?;
                xs.push((idx, TaggedElement { degree: d, coeffs }));
            }
            other => {
                return parse_err(ln, format!("unknown key {:?}", other));
            }
        }
        if toks.next().is_some() {
            return parse_err(ln, "trailing tokens");
        }
    }
    let require = |name: &str, v: Option<u128>| {
        v.ok_or(MessageError::Parse {
            line: last_line,
            what: format!("missing field {}", name),
        })
    };
    let p = require("p", p)?;
    let s_val = s.ok_or(MessageError::Parse {
        line: last_line,
        what: "missing field s".into(),
    })?;
    let r_val = r.ok_or(MessageError::Parse {
        line: last_line,
        what: "missing field r".into(),
    })?;
    let z1 = require("z1", z1)?;
    let z2 = require("z2", z2)?;
    // positions must be exactly 0..s in order
    let mut elems = Vec::with_capacity(xs.len());
    for (want, (got, el)) in xs.into_iter().enumerate() {
        if got != want {
            return Err(MessageError::Parse {
                line: last_line,
                what: format!("abscissa index {} out of order (expected {})", got, want),
            });
        }
        elems.push(el);
    }
    Ok(BroadcastMessage {
        version: MESSAGE_FORMAT_VERSION,
        block_index: block_index.unwrap_or(0),
        p,
        s: s_val,
        r: r_val,
        z1,
        z2,
        moduli,
        xs: elems,
    })
}

fn parse_num<T: std::str::FromStr>(tok: Option<&str>, line: usize) -> Result<T, MessageError> {
    tok.and_then(|t| t.parse().ok()).ok_or(MessageError::Parse {
        line,
        what: "expected a number".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_message() -> BroadcastMessage {
        BroadcastMessage {
            version: 1,
            block_index: 0,
            p: 101,
            s: 4,
            r: 2,
            z1: 5,
            z2: 17,
            // x^2 - 2: 2 is a non-residue mod 101
            moduli: BTreeMap::from([(2, vec![99, 0, 1])]),
            xs: vec![
                TaggedElement::base(33),
                TaggedElement::base(60),
                TaggedElement {
                    degree: 2,
                    coeffs: vec![4, 9],
                },
                TaggedElement {
                    degree: 2,
                    coeffs: vec![4, 92],
                },
            ],
        }
    }

    #[test]
    fn round_trip_identity() {
        let msg = sample_message();
        msg.validate().unwrap();
        let text = encode_message(&msg);
        let back = decode_message(&text).unwrap();
        assert_eq!(back, msg);
        // deterministic encoding
        assert_eq!(text, encode_message(&back));
    }

    #[test]
    fn rejects_equal_anchors() {
        let mut msg = sample_message();
        msg.z2 = msg.z1;
        let err = msg.validate().unwrap_err();
        assert_eq!(err, MessageError::Invariant("z1 != z2".into()));
    }

    #[test]
    fn rejects_missing_modulus() {
        let mut msg = sample_message();
        msg.moduli.clear();
        let err = msg.validate().unwrap_err();
        assert!(matches!(err, MessageError::Invariant(s) if s.contains("missing modulus")));
    }

    #[test]
    fn rejects_reducible_modulus() {
        let mut msg = sample_message();
        // x^2 - 1 factors over F_101
        msg.moduli.insert(2, vec![100, 0, 1]);
        let err = msg.validate().unwrap_err();
        assert!(matches!(err, MessageError::Invariant(s) if s.contains("reducible")));
    }

    #[test]
    fn rejects_duplicate_abscissa() {
        let mut msg = sample_message();
        msg.xs[1] = TaggedElement::base(33);
        let err = msg.validate().unwrap_err();
        assert!(matches!(err, MessageError::Invariant(s) if s.contains("duplicate")));
    }

    #[test]
    fn rejects_truncation() {
        let msg = sample_message();
        let text = encode_message(&msg);
        let cut = &text[..text.len() - 10];
        let err = decode_messages(cut).unwrap_err();
        assert!(matches!(err, MessageError::Parse { .. }));
    }

    #[test]
    fn parse_error_carries_line() {
        let text = "polyrec-message v1\nblocks 1\nblock 0\nwhatever 3\nend\n";
        match decode_messages(text) {
            Err(MessageError::Parse { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {:?}", other),
        }
    }
}
