//! Polynomial-interpolation key reconciliation for quantum key distribution.
//!
//! The crate is organized around the post-processing pipeline of a QKD link:
//!
//! - [`ff`] — exact arithmetic in prime fields `F_p` and extension fields
//!   `F_{p^e}` represented as residues modulo a monic irreducible.
//! - [`poly`] — dense polynomial arithmetic: Newton interpolation, gcd,
//!   Frobenius powers, distinct-degree root location and probabilistic root
//!   extraction (Cantor–Zassenhaus splitting).
//! - [`protocol`] — the two-party block reconciliation protocol: Alice's
//!   encoder, Bob's reconciler, session orchestration and the broadcast
//!   message wire format.
//! - [`channel`] — fiber/FSO link model (QBER vs. distance) and binary
//!   symmetric corruption of keys.
//! - [`analysis`] — closed-form and Monte-Carlo performance figures: frame
//!   error rate, information leakage, secret key fraction and throughput
//!   sweeps.
//! - [`seeds`] — deterministic RNG stream derivation so that serial, parallel
//!   and file-pipeline runs agree bit for bit.
//!
//! All arithmetic is simulation-grade: values are exact, but no attempt is
//! made at constant-time execution or side-channel hardening.

pub mod analysis;
pub mod channel;
pub mod ff;
pub mod poly;
pub mod protocol;
pub mod seeds;

pub use ff::{ExtensionField, FieldElement, PrimeField};
pub use poly::Polynomial;
pub use protocol::{BlockOutcome, BlockParams, BroadcastMessage, SessionReport};
