//! Performance figures: entropy, frame error rate (closed form and
//! Monte-Carlo), information leakage, secret key fraction and throughput
//! sweeps.
//!
//! The closed-form FER ships in two variants. `Literal` transcribes the
//! printed expression `1 - (sum_{z=r+1}^{s} (1-eps)^z eps^(s-z))^k`;
//! `Binomial` (the default) inserts the binomial coefficient, which turns
//! the inner sum into the probability of at least `r+1` correct bits out of
//! `s` — the event the reconciler actually needs — and is the form that
//! Monte-Carlo simulation reproduces.
//!
//! The Monte-Carlo estimator runs the full pipeline (encode, corrupt,
//! reconcile) and splits its failure mass into the closed-form event (some
//! block with fewer than `r+1` correct bits), the structural excess
//! (enough correct bits but no single-degree subset worked within the retry
//! cap) and encoder failures, so the closed-form comparison can be made
//! against like for like.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::channel::{self, LinkParams, LinkState};
use crate::protocol::{self, BlockParams, ProtocolError};
use crate::seeds;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AnalysisError {
    #[error("probability outside [0, 1]")]
    DomainError,
    #[error("invalid parameter: {0}")]
    ParameterError(String),
    #[error("proposed-scheme leakage queried outside its regime: {0}")]
    ConditionViolated(String),
    #[error("external curve has no data at qber = {0}")]
    CurveOutOfRange(f64),
    #[error("external curve parse error at line {line}: {what}")]
    CurveParse { line: usize, what: String },
    #[error(transparent)]
    Protocol(#[from] ProtocolError),
    #[error(transparent)]
    Channel(#[from] channel::ChannelError),
}

/// Shannon entropy of a binary variable, in bits, with `0 log 0 = 0`.
pub fn binary_entropy(theta: f64) -> Result<f64, AnalysisError> {
    if !(0.0..=1.0).contains(&theta) || theta.is_nan() {
        return Err(AnalysisError::DomainError);
    }
    let term = |t: f64| if t == 0.0 { 0.0 } else { -t * t.log2() };
    Ok(term(theta) + term(1.0 - theta))
}

// ---------------------------------------------------------------------------
// Frame error rate, closed form
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FerVariant {
    /// the expression exactly as printed (no binomial coefficient)
    Literal,
    /// with C(s, z): the probability of >= r+1 correct bits in s trials
    Binomial,
}

fn binomial_f64(s: usize, z: usize) -> f64 {
    // exact in u128 for the block sizes the protocol uses
    if s <= 100 {
        let mut c: u128 = 1;
        let k = z.min(s - z);
        for i in 0..k {
            c = c * (s - i) as u128 / (i + 1) as u128;
        }
        c as f64
    } else {
        let mut c = 1f64;
        let k = z.min(s - z);
        for i in 0..k {
            c = c * (s - i) as f64 / (i + 1) as f64;
        }
        c
    }
}

/// Closed-form frame error rate over `k_blocks` consecutive blocks.
pub fn fer_closed_form(
    s: usize,
    r: usize,
    epsilon: f64,
    k_blocks: usize,
    variant: FerVariant,
) -> Result<f64, AnalysisError> {
    if r + 1 > s || r < 1 {
        return Err(AnalysisError::ParameterError(format!(
            "need 1 <= r + 1 <= s, got r = {}, s = {}",
            r, s
        )));
    }
    if k_blocks == 0 {
        return Err(AnalysisError::ParameterError("k_blocks >= 1".into()));
    }
    if s > 1000 {
        return Err(AnalysisError::ParameterError("s > 1000 unsupported".into()));
    }
    if !(0.0..=1.0).contains(&epsilon) || epsilon.is_nan() {
        return Err(AnalysisError::DomainError);
    }
    let mut inner = 0f64;
    for z in (r + 1)..=s {
        let body = (1.0 - epsilon).powi(z as i32) * epsilon.powi((s - z) as i32);
        let term = match variant {
            FerVariant::Literal => body,
            FerVariant::Binomial => binomial_f64(s, z) * body,
        };
        inner += term;
    }
    let inner = inner.min(1.0);
    Ok(1.0 - inner.powi(k_blocks as i32))
}

// ---------------------------------------------------------------------------
// Frame error rate, Monte-Carlo
// ---------------------------------------------------------------------------

/// Monte-Carlo FER estimate with its failure mass decomposed.
#[derive(Debug, Clone, Serialize)]
pub struct McFer {
    pub trials: u64,
    /// raw fraction of failed frames
    pub estimate: f64,
    /// 95% binomial half-width of `estimate`
    pub half_width: f64,
    /// frames where some block had fewer than r+1 correct bits — the event
    /// the closed form models
    pub core_estimate: f64,
    /// frames with >= r+1 correct bits per block where some block still had
    /// no single-degree position pool holding r+1 correct entries: the
    /// mixed-degree-subset deviation, which no amount of retrying cures
    pub pool_deviation_rate: f64,
    /// frames where a clean single-degree subset existed for every block but
    /// the capped uniform retries missed it; nonnegative by construction
    pub capped_excess_rate: f64,
    /// frames lost to encoder failures (root shortage past the resample cap)
    pub encode_failure_rate: f64,
    /// key blocks redrawn because a bit value occurred more than r times;
    /// denominator is trials * k_blocks
    pub infeasible_redraw_rate: f64,
}

/// Full-pipeline Monte-Carlo FER at one error rate.
///
/// Each trial draws `k_blocks` random key blocks (redrawing blocks whose bit
/// counts make them unencodable, which is reported, so every trial exercises
/// encode → corrupt → reconcile), then counts the frame as failed if any
/// block fails.
///
/// Blocks where no single-degree position pool retains r+1 correct entries
/// are scored failed directly: the reconciler provably cannot accept them
/// except through a false accept of probability ~(2/p)^(s-r), far below
/// anything the trial counts can resolve. Recoverable blocks run the real
/// reconciler under its retry cap.
///
/// Trials run in parallel over derived seeds; results are independent of
/// thread count.
pub fn fer_monte_carlo(
    params: &BlockParams,
    epsilon: f64,
    k_blocks: usize,
    trials: u64,
    master_seed: u64,
) -> Result<McFer, AnalysisError> {
    if trials == 0 {
        return Err(AnalysisError::ParameterError("trials >= 1".into()));
    }
    if k_blocks == 0 {
        return Err(AnalysisError::ParameterError("k_blocks >= 1".into()));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(AnalysisError::DomainError);
    }
    params.validate()?;

    #[derive(Default)]
    struct Tally {
        failed: u64,
        core: u64,
        pool: u64,
        capped: u64,
        encode_failed: u64,
        redraws: u64,
    }

    let tally = (0..trials)
        .into_par_iter()
        .map(|trial| {
            let mut rng = seeds::derive_rng(master_seed, "mc-trial", trial);
            let mut t = Tally::default();
            let mut frame_failed = false;
            let mut frame_core = false;
            let mut frame_pool = false;
            let mut frame_encode_failed = false;
            for _block in 0..k_blocks {
                let bits = loop {
                    let candidate = channel::generate_key(params.s, &mut rng)
                        .expect("s >= 1");
                    let n0 = candidate.iter().filter(|&&b| b == 0).count();
                    if n0 <= params.r && params.s - n0 <= params.r {
                        break candidate;
                    }
                    t.redraws += 1;
                };
                let encoded = protocol::alice_encode_block(&bits, params, &mut rng);
                let (msg, _) = match encoded {
                    Ok(v) => v,
                    Err(ProtocolError::EncodeBudgetExhausted(_)) => {
                        frame_encode_failed = true;
                        frame_failed = true;
                        continue;
                    }
                    Err(e) => panic!("unexpected encode error: {e}"),
                };
                let (noisy, flips) =
                    channel::corrupt_bits(&bits, epsilon, &mut rng).expect("epsilon in range");
                if params.s - flips.len() < params.r + 1 {
                    frame_core = true;
                    frame_failed = true;
                    continue;
                }
                if !clean_pool_exists(&msg, &flips, params) {
                    frame_pool = true;
                    frame_failed = true;
                    continue;
                }
                let outcome = protocol::bob_reconcile_block(&noisy, &msg, params, &mut rng)
                    .expect("valid message");
                if !outcome.is_accepted() {
                    frame_failed = true;
                }
            }
            if frame_failed {
                t.failed = 1;
                if frame_encode_failed {
                    t.encode_failed = 1;
                } else if frame_core {
                    t.core = 1;
                } else if frame_pool {
                    t.pool = 1;
                } else {
                    t.capped = 1;
                }
            }
            t
        })
        .reduce(Tally::default, |mut a, b| {
            a.failed += b.failed;
            a.core += b.core;
            a.pool += b.pool;
            a.capped += b.capped;
            a.encode_failed += b.encode_failed;
            a.redraws += b.redraws;
            a
        });

    let n = trials as f64;
    let estimate = tally.failed as f64 / n;
    Ok(McFer {
        trials,
        estimate,
        half_width: 1.96 * (estimate * (1.0 - estimate) / n).sqrt(),
        core_estimate: tally.core as f64 / n,
        pool_deviation_rate: tally.pool as f64 / n,
        capped_excess_rate: tally.capped as f64 / n,
        encode_failure_rate: tally.encode_failed as f64 / n,
        infeasible_redraw_rate: tally.redraws as f64 / (n * k_blocks as f64),
    })
}

/// Whether some single-degree position pool (base-field positions plus one
/// extension degree's) still holds r + validation_extra correct entries —
/// exactly the condition under which an all-correct retry subset exists.
fn clean_pool_exists(
    msg: &crate::protocol::BroadcastMessage,
    flips: &[usize],
    params: &BlockParams,
) -> bool {
    use std::collections::BTreeMap;
    let flipped: Vec<bool> = {
        let mut v = vec![false; msg.s];
        for &i in flips {
            v[i] = true;
        }
        v
    };
    let need = msg.r + params.validation_extra;
    let mut base_clean = 0usize;
    let mut ext_clean: BTreeMap<usize, usize> = BTreeMap::new();
    let mut ext_present: BTreeMap<usize, ()> = BTreeMap::new();
    for (i, x) in msg.xs.iter().enumerate() {
        if x.degree == 1 {
            if !flipped[i] {
                base_clean += 1;
            }
        } else {
            ext_present.insert(x.degree, ());
            if !flipped[i] {
                *ext_clean.entry(x.degree).or_insert(0) += 1;
            }
        }
    }
    if base_clean >= need {
        return true;
    }
    ext_present
        .keys()
        .any(|d| base_clean + ext_clean.get(d).copied().unwrap_or(0) >= need)
}

// ---------------------------------------------------------------------------
// Leakage, secret key fraction, throughput
// ---------------------------------------------------------------------------

/// FER-vs-QBER table with a constant leak rate, supplied by the user for
/// externally characterized codes.
#[derive(Debug, Clone, Serialize)]
pub struct ExternalCurve {
    pub name: String,
    pub leak_rate: f64,
    /// (qber, fer), sorted by qber
    pub table: Vec<(f64, f64)>,
}

impl ExternalCurve {
    /// Parses the two-column CSV format: `# leak_rate = <v>` comment lines,
    /// a `qber,fer` header, then data rows sorted by qber.
    pub fn from_csv(name: &str, text: &str) -> Result<Self, AnalysisError> {
        let mut leak_rate = None;
        let mut table = Vec::new();
        let mut saw_header = false;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let ln = i + 1;
            if line.is_empty() {
                continue;
            }
            if let Some(comment) = line.strip_prefix('#') {
                if let Some((k, v)) = comment.split_once('=') {
                    if k.trim() == "leak_rate" {
                        leak_rate =
                            Some(v.trim().parse::<f64>().map_err(|_| {
                                AnalysisError::CurveParse {
                                    line: ln,
                                    what: "bad leak_rate".into(),
                                }
                            })?);
                    }
                }
                continue;
            }
            if !saw_header {
                if line != "qber,fer" {
                    return Err(AnalysisError::CurveParse {
                        line: ln,
                        what: format!("expected header `qber,fer`, got {:?}", line),
                    });
                }
                saw_header = true;
                continue;
            }
            let Some((a, b)) = line.split_once(',') else {
                return Err(AnalysisError::CurveParse {
                    line: ln,
                    what: "expected `qber,fer` row".into(),
                });
            };
            let parse = |s: &str| {
                s.trim().parse::<f64>().map_err(|_| AnalysisError::CurveParse {
                    line: ln,
                    what: format!("bad number {:?}", s),
                })
            };
            let q = parse(a)?;
            let f = parse(b)?;
            if !(0.0..=1.0).contains(&q) || !(0.0..=1.0).contains(&f) {
                return Err(AnalysisError::CurveParse {
                    line: ln,
                    what: "values must lie in [0, 1]".into(),
                });
            }
            table.push((q, f));
        }
        let leak_rate = leak_rate.ok_or(AnalysisError::CurveParse {
            line: 1,
            what: "missing `# leak_rate = <v>`".into(),
        })?;
        if table.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(AnalysisError::CurveParse {
                line: 1,
                what: "table must be strictly sorted by qber".into(),
            });
        }
        Ok(ExternalCurve {
            name: name.to_string(),
            leak_rate,
            table,
        })
    }

    /// Linear interpolation of FER at `qber`; out of range is an error, not
    /// an extrapolation.
    pub fn fer_at(&self, qber: f64) -> Result<f64, AnalysisError> {
        let first = self.table.first().ok_or(AnalysisError::CurveOutOfRange(qber))?;
        let last = self.table.last().unwrap();
        if qber < first.0 || qber > last.0 {
            return Err(AnalysisError::CurveOutOfRange(qber));
        }
        let idx = self
            .table
            .partition_point(|&(q, _)| q < qber);
        if idx < self.table.len() && self.table[idx].0 == qber {
            return Ok(self.table[idx].1);
        }
        let (q0, f0) = self.table[idx - 1];
        let (q1, f1) = self.table[idx];
        Ok(f0 + (f1 - f0) * (qber - q0) / (q1 - q0))
    }
}

/// Reconciliation scheme whose leakage and FER feed a throughput curve.
#[derive(Debug, Clone, Serialize)]
pub enum SchemeSpec {
    /// this protocol: zero leakage inside its regime, FER from the closed
    /// form or Monte-Carlo
    Proposed,
    /// error-correcting codes at the Slepian-Wolf limit: leak = H(qber),
    /// FER = 0 by definition of the asymptote
    AsymptoticEcc,
    /// an (n, k) code with ideal decoding: leak = (n - k)/n
    EccNk { n: u64, k: u64 },
    /// user-supplied FER curve with a constant leak rate
    External(ExternalCurve),
}

impl SchemeSpec {
    pub fn label(&self) -> String {
        match self {
            SchemeSpec::Proposed => "proposed".into(),
            SchemeSpec::AsymptoticEcc => "asymptotic_ecc".into(),
            SchemeSpec::EccNk { n, k } => format!("ecc_{}_{}", n, k),
            SchemeSpec::External(c) => format!("curve_{}", c.name),
        }
    }
}

/// Revealed-information rate of a scheme at the given QBER.
///
/// The proposed scheme leaks nothing, but only inside the regime its proof
/// covers (`gamma <= (r-1)/s`); outside it the query is refused rather than
/// silently zeroed.
pub fn leakage_rate(
    scheme: &SchemeSpec,
    qber: f64,
    block: &BlockParams,
) -> Result<f64, AnalysisError> {
    if !(0.0..=1.0).contains(&qber) || qber.is_nan() {
        return Err(AnalysisError::DomainError);
    }
    match scheme {
        SchemeSpec::Proposed => {
            let bound = (block.r.saturating_sub(1)) as f64 / block.s as f64;
            if block.gamma > bound {
                return Err(AnalysisError::ConditionViolated(format!(
                    "gamma = {} exceeds (r-1)/s = {}",
                    block.gamma, bound
                )));
            }
            Ok(0.0)
        }
        SchemeSpec::AsymptoticEcc => binary_entropy(qber),
        SchemeSpec::EccNk { n, k } => {
            if *k == 0 || k > n {
                return Err(AnalysisError::ParameterError(
                    "ecc_nk requires 0 < k <= n".into(),
                ));
            }
            Ok((n - k) as f64 / *n as f64)
        }
        SchemeSpec::External(c) => Ok(c.leak_rate),
    }
}

/// Secret key fraction `rho = upsilon1_hat * (1 - H(eps1)) - rho_leak`.
/// May be negative; callers flag such records unusable.
pub fn secret_key_fraction(state: &LinkState, rho_leak: f64) -> Result<f64, AnalysisError> {
    let h = binary_entropy(state.eps1)?;
    Ok(state.upsilon1_hat * (1.0 - h) - rho_leak)
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct ThroughputPoint {
    /// secret key rate `(1 - FER) * p_exp * q * rho`
    pub r_s: f64,
    /// secret key throughput `r_s * f_sc` [bits/s]
    pub s_bps: f64,
    /// false when rho <= 0 or FER = 1 forced the throughput to zero
    pub usable: bool,
}

/// Secret key rate and throughput; non-positive `rho` or FER = 1 yield a
/// zero, flagged result.
pub fn throughput(
    state: &LinkState,
    fer: f64,
    rho: f64,
    link: &LinkParams,
) -> Result<ThroughputPoint, AnalysisError> {
    if !(0.0..=1.0).contains(&fer) || fer.is_nan() {
        return Err(AnalysisError::DomainError);
    }
    if rho <= 0.0 || fer >= 1.0 {
        return Ok(ThroughputPoint {
            r_s: 0.0,
            s_bps: 0.0,
            usable: false,
        });
    }
    let r_s = (1.0 - fer) * state.p_exp * link.q * rho;
    Ok(ThroughputPoint {
        r_s,
        s_bps: r_s * link.f_sc,
        usable: true,
    })
}

// ---------------------------------------------------------------------------
// Sweeps
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum FerMode {
    Closed,
    MonteCarlo,
}

/// One per-distance, per-scheme analysis row.
#[derive(Debug, Clone, Serialize)]
pub struct CurveRecord {
    pub scheme: String,
    pub k_km: f64,
    pub qber: f64,
    pub fer: f64,
    pub rho_leak: f64,
    pub upsilon1_hat: f64,
    pub eps1: f64,
    pub rho: f64,
    pub r_s: f64,
    pub throughput_bps: f64,
    /// quantum-side leak rate `upsilon1_hat * H(eps1)`, informational
    pub quantum_leak_rate: f64,
    /// throughput is meaningful (rho > 0 and FER < 1)
    pub usable: bool,
    /// false when a component error invalidated this record
    pub valid: bool,
    pub note: String,
}

pub const CURVE_CSV_HEADER: &str =
    "scheme,k_km,qber,fer,rho_leak,upsilon1_hat,eps1,rho,r_s,throughput_bps,quantum_leak_rate,usable,valid,note";

pub fn curve_records_to_csv(records: &[CurveRecord]) -> String {
    let mut out = String::from(CURVE_CSV_HEADER);
    out.push('\n');
    for r in records {
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            r.scheme,
            r.k_km,
            r.qber,
            r.fer,
            r.rho_leak,
            r.upsilon1_hat,
            r.eps1,
            r.rho,
            r.r_s,
            r.throughput_bps,
            r.quantum_leak_rate,
            r.usable,
            r.valid,
            r.note
        ));
    }
    out
}

/// Options for [`sweep_curves`].
#[derive(Debug, Clone)]
pub struct SweepOptions {
    pub fer_mode: FerMode,
    /// number of blocks per frame in the FER (k in the closed form)
    pub k_blocks: usize,
    /// Monte-Carlo trials per grid point (MonteCarlo mode)
    pub trials: u64,
    pub master_seed: u64,
}

impl Default for SweepOptions {
    fn default() -> Self {
        SweepOptions {
            fer_mode: FerMode::Closed,
            k_blocks: 10,
            trials: 200,
            master_seed: 0,
        }
    }
}

/// Per-distance, per-scheme composition of the link model and the scheme's
/// leakage and FER sources. Component errors mark the record invalid rather
/// than aborting the sweep. Records come out scheme-major in grid order.
pub fn sweep_curves(
    link: &LinkParams,
    distances: &[f64],
    block: &BlockParams,
    schemes: &[SchemeSpec],
    opts: &SweepOptions,
) -> Result<Vec<CurveRecord>, AnalysisError> {
    link.validate()?;
    let mut records = Vec::with_capacity(distances.len() * schemes.len());
    for (si, scheme) in schemes.iter().enumerate() {
        for (ki, &k_km) in distances.iter().enumerate() {
            let state = channel::link_rates(link, k_km)?;
            let mut note = String::new();
            let mut valid = true;
            let rho_leak = match leakage_rate(scheme, state.qber, block) {
                Ok(v) => v,
                Err(e) => {
                    valid = false;
                    note = e.to_string();
                    f64::NAN
                }
            };
            let fer = if valid {
                match scheme {
                    SchemeSpec::Proposed => match opts.fer_mode {
                        FerMode::Closed => fer_closed_form(
                            block.s,
                            block.r,
                            state.qber,
                            opts.k_blocks,
                            FerVariant::Binomial,
                        )
                        .unwrap_or(1.0),
                        FerMode::MonteCarlo => {
                            let seed = seeds::derive_seed(
                                opts.master_seed,
                                "sweep",
                                (si * distances.len() + ki) as u64,
                            );
                            match fer_monte_carlo(
                                block,
                                state.qber,
                                opts.k_blocks,
                                opts.trials,
                                seed,
                            ) {
                                Ok(mc) => mc.estimate,
                                Err(e) => {
                                    valid = false;
                                    note = e.to_string();
                                    f64::NAN
                                }
                            }
                        }
                    },
                    SchemeSpec::AsymptoticEcc => 0.0,
                    // ideal decoding assumption: the (n, k) code is charged
                    // only for its leak rate
                    SchemeSpec::EccNk { .. } => 0.0,
                    SchemeSpec::External(c) => match c.fer_at(state.qber) {
                        Ok(v) => v,
                        Err(e) => {
                            valid = false;
                            note = e.to_string();
                            f64::NAN
                        }
                    },
                }
            } else {
                f64::NAN
            };
            let (rho, point) = if valid {
                let rho = secret_key_fraction(&state, rho_leak)?;
                let point = throughput(&state, fer.clamp(0.0, 1.0), rho, link)?;
                (rho, point)
            } else {
                (
                    f64::NAN,
                    ThroughputPoint {
                        r_s: 0.0,
                        s_bps: 0.0,
                        usable: false,
                    },
                )
            };
            let quantum_leak_rate = state.upsilon1_hat * binary_entropy(state.eps1)?;
            records.push(CurveRecord {
                scheme: scheme.label(),
                k_km,
                qber: state.qber,
                fer,
                rho_leak,
                upsilon1_hat: state.upsilon1_hat,
                eps1: state.eps1,
                rho,
                r_s: point.r_s,
                throughput_bps: point.s_bps,
                quantum_leak_rate,
                usable: point.usable,
                valid,
                note,
            });
        }
    }
    Ok(records)
}

/// Inclusive distance grid `from`, `from + step`, ... up to `to`.
pub fn distance_grid(from: f64, to: f64, step: f64) -> Result<Vec<f64>, AnalysisError> {
    if step <= 0.0 || to < from || from < 0.0 {
        return Err(AnalysisError::ParameterError("bad distance grid".into()));
    }
    let mut out = Vec::new();
    let mut k = from;
    let eps = step * 1e-9;
    while k <= to + eps {
        out.push(k);
        k += step;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::FAST_TEST_PRIME;

    fn desk_params(s: usize, r: usize, bob_max: u64) -> BlockParams {
        BlockParams {
            p: FAST_TEST_PRIME,
            s,
            r,
            gamma: ((r as f64 - 1.0) / s as f64).min(0.3),
            bob_max_attempts: bob_max,
            small_field_ok: true,
            ..BlockParams::default()
        }
    }

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.11).unwrap() - 0.49991).abs() < 1e-4);
        assert!(binary_entropy(1.2).is_err());
        assert!(binary_entropy(-0.1).is_err());
    }

    #[test]
    fn fer_closed_form_examples() {
        // enumerated oracle over all 16 patterns at s = 4, r = 2, eps = 0.25
        assert_eq!(
            fer_closed_form(4, 2, 0.25, 1, FerVariant::Binomial).unwrap(),
            0.26171875
        );
        // two-term literal sum 0.75^3 * 0.25 + 0.75^4
        assert_eq!(
            fer_closed_form(4, 2, 0.25, 1, FerVariant::Literal).unwrap(),
            0.578125
        );
        for variant in [FerVariant::Literal, FerVariant::Binomial] {
            assert_eq!(fer_closed_form(10, 4, 0.0, 3, variant).unwrap(), 0.0);
            assert_eq!(fer_closed_form(10, 4, 1.0, 3, variant).unwrap(), 1.0);
        }
        assert!(fer_closed_form(4, 4, 0.1, 1, FerVariant::Binomial).is_err());
        assert!(fer_closed_form(4, 2, 1.5, 1, FerVariant::Binomial).is_err());
    }

    #[test]
    fn fer_block_count_law() {
        // fer(..., k) = 1 - (1 - fer(..., 1))^k exactly
        for variant in [FerVariant::Literal, FerVariant::Binomial] {
            for (s, r, eps) in [(24, 16, 0.1), (40, 28, 0.05), (12, 5, 0.3)] {
                let f1 = fer_closed_form(s, r, eps, 1, variant).unwrap();
                for k in [2usize, 5, 10] {
                    let fk = fer_closed_form(s, r, eps, k, variant).unwrap();
                    assert_eq!(fk, 1.0 - (1.0 - f1).powi(k as i32));
                }
            }
        }
    }

    #[test]
    fn fer_monotonicity() {
        use rand::Rng;
        let mut rng = crate::seeds::derive_rng(5, "fer-mono", 0);
        for _ in 0..200 {
            let s = 6 + (rng.gen::<u64>() % 60) as usize;
            let r = 1 + (rng.gen::<u64>() % (s as u64 - 1)) as usize;
            let eps = rng.gen::<f64>();
            let f = |s, r, e| fer_closed_form(s, r, e, 1, FerVariant::Binomial).unwrap();
            // non-decreasing in eps
            let eps2 = (eps + rng.gen::<f64>() * (1.0 - eps)).min(1.0);
            assert!(f(s, r, eps2) >= f(s, r, eps) - 1e-12);
            // non-decreasing in k
            let f1 = fer_closed_form(s, r, eps, 1, FerVariant::Binomial).unwrap();
            let f3 = fer_closed_form(s, r, eps, 3, FerVariant::Binomial).unwrap();
            assert!(f3 >= f1 - 1e-12);
            // non-increasing in s at fixed r
            assert!(f(s + 1, r, eps) <= f(s, r, eps) + 1e-12);
            // non-decreasing in r at fixed s
            if r + 2 <= s {
                assert!(f(s, r + 1, eps) >= f(s, r, eps) - 1e-12);
            }
        }
    }

    #[test]
    fn leakage_values() {
        let block = desk_params(100, 70, 100);
        assert_eq!(
            leakage_rate(&SchemeSpec::Proposed, 0.05, &block).unwrap(),
            0.0
        );
        // (1008, 504) -> 0.5 and (1998, 1776) -> 0.111...
        assert_eq!(
            leakage_rate(&SchemeSpec::EccNk { n: 1008, k: 504 }, 0.05, &block).unwrap(),
            0.5
        );
        assert!(
            (leakage_rate(&SchemeSpec::EccNk { n: 1998, k: 1776 }, 0.05, &block).unwrap()
                - 0.111111111)
                .abs()
                < 1e-9
        );
        assert_eq!(
            leakage_rate(&SchemeSpec::AsymptoticEcc, 0.5, &block).unwrap(),
            1.0
        );
        // outside the regime: gamma > (r-1)/s
        let tight = BlockParams {
            gamma: 0.9,
            ..block
        };
        assert!(matches!(
            leakage_rate(&SchemeSpec::Proposed, 0.05, &tight),
            Err(AnalysisError::ConditionViolated(_))
        ));
    }

    #[test]
    fn leakage_ordering() {
        // 0 = proposed <= H(eps) <= practical code rates in their regime
        let block = desk_params(100, 70, 100);
        for &eps in &[0.0, 0.01, 0.05, 0.08, 0.11] {
            let p = leakage_rate(&SchemeSpec::Proposed, eps, &block).unwrap();
            let sw = leakage_rate(&SchemeSpec::AsymptoticEcc, eps, &block).unwrap();
            let c1 = leakage_rate(&SchemeSpec::EccNk { n: 1008, k: 504 }, eps, &block).unwrap();
            assert!(p <= sw && sw <= c1, "eps = {}", eps);
        }
    }

    #[test]
    fn secret_key_fraction_examples() {
        let mk = |u, e1| LinkState {
            t: 0.0,
            p_signal: 0.0,
            p_exp: 0.0,
            qber: 0.0,
            upsilon1_hat: u,
            eps1: e1,
            usable: true,
        };
        assert_eq!(secret_key_fraction(&mk(1.0, 0.0), 0.0).unwrap(), 1.0);
        let v = secret_key_fraction(&mk(0.9, 0.11), 0.0).unwrap();
        assert!((v - 0.45008).abs() < 1e-4);
        let neg = secret_key_fraction(&mk(0.9, 0.11), 0.5).unwrap();
        assert!((neg + 0.04992).abs() < 1e-4);
        assert!(neg < 0.0);
    }

    #[test]
    fn throughput_examples() {
        let link = LinkParams::fiber_default();
        let state = LinkState {
            t: 0.1,
            p_signal: 1e-3,
            p_exp: 1e-3,
            qber: 0.0,
            upsilon1_hat: 1.0,
            eps1: 0.0,
            usable: true,
        };
        // p_exp = 1e-3, q = 0.5, rho = 0.4, FER = 0, f_sc = 1e9
        let tp = throughput(&state, 0.0, 0.4, &link).unwrap();
        assert!((tp.r_s - 2e-4).abs() < 1e-19);
        assert!((tp.s_bps - 2e5).abs() < 1e-9 * 2e5);
        assert!(tp.usable);
        let dead = throughput(&state, 1.0, 0.4, &link).unwrap();
        assert_eq!(dead.s_bps, 0.0);
        assert!(!dead.usable);
        let neg = throughput(&state, 0.0, -0.1, &link).unwrap();
        assert_eq!(neg.s_bps, 0.0);
        assert!(!neg.usable);
    }

    #[test]
    fn monte_carlo_agrees_on_small_case() {
        // smoke-scale version of the acceptance comparison
        let params = desk_params(12, 8, 2000);
        let closed = fer_closed_form(12, 8, 0.1, 1, FerVariant::Binomial).unwrap();
        let mc = fer_monte_carlo(&params, 0.1, 1, 600, 42).unwrap();
        let sigma = (closed * (1.0 - closed) / 600.0).sqrt();
        assert!(
            (mc.core_estimate - closed).abs() <= 4.0 * sigma.max(1e-3),
            "core = {}, closed = {}",
            mc.core_estimate,
            closed
        );
        assert!(mc.capped_excess_rate >= 0.0);
        let sum = mc.core_estimate
            + mc.pool_deviation_rate
            + mc.capped_excess_rate
            + mc.encode_failure_rate;
        assert!((mc.estimate - sum).abs() < 1e-12);
    }

    #[test]
    fn monte_carlo_zero_and_one() {
        let params = desk_params(12, 8, 200);
        let mc = fer_monte_carlo(&params, 0.0, 2, 50, 7).unwrap();
        assert_eq!(mc.estimate, 0.0);
        let mc = fer_monte_carlo(&params, 0.9, 1, 50, 7).unwrap();
        assert!(mc.estimate > 0.95);
    }

    #[test]
    fn external_curve_parsing_and_lookup() {
        let text = "# leak_rate = 0.5\nqber,fer\n0.01,0.001\n0.03,0.5\n0.05,1.0\n";
        let curve = ExternalCurve::from_csv("ldpc", text).unwrap();
        assert_eq!(curve.leak_rate, 0.5);
        assert_eq!(curve.fer_at(0.03).unwrap(), 0.5);
        assert!((curve.fer_at(0.02).unwrap() - 0.2505).abs() < 1e-12);
        assert!(matches!(
            curve.fer_at(0.2),
            Err(AnalysisError::CurveOutOfRange(_))
        ));
        assert!(ExternalCurve::from_csv("bad", "qber,fer\n0.1,0.2\n").is_err());
    }

    #[test]
    fn sweep_shapes_and_flags() {
        let link = LinkParams::fiber_default();
        let block = desk_params(24, 16, 100);
        let grid = distance_grid(0.0, 20.0, 5.0).unwrap();
        assert_eq!(grid.len(), 5);
        let schemes = vec![SchemeSpec::Proposed, SchemeSpec::AsymptoticEcc];
        let records =
            sweep_curves(&link, &grid, &block, &schemes, &SweepOptions::default()).unwrap();
        assert_eq!(records.len(), 10);
        // empty scheme list -> empty output
        let none = sweep_curves(&link, &grid, &block, &[], &SweepOptions::default()).unwrap();
        assert!(none.is_empty());
        // CSV round shape
        let csv = curve_records_to_csv(&records);
        assert_eq!(csv.lines().count(), 11);
        assert!(csv.starts_with(CURVE_CSV_HEADER));
    }

    #[test]
    fn sweep_zero_distance_composition() {
        // at K = 0 the proposed record matches the hand-composed formula
        let link = LinkParams::fiber_default();
        let block = desk_params(24, 16, 100);
        let records = sweep_curves(
            &link,
            &[0.0],
            &block,
            &[SchemeSpec::Proposed],
            &SweepOptions::default(),
        )
        .unwrap();
        let rec = &records[0];
        let state = channel::link_rates(&link, 0.0).unwrap();
        let expect = state.p_exp
            * link.q
            * state.upsilon1_hat
            * (1.0 - binary_entropy(state.eps1).unwrap())
            * link.f_sc
            * (1.0 - rec.fer);
        assert!((rec.throughput_bps - expect).abs() <= 1e-9 * expect.abs().max(1.0));
        assert_eq!(rec.rho_leak, 0.0);
    }
}
