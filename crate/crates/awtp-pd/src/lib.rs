//! Simulation and analysis of message transmission over an adversarial
//! wiretap channel paired with a public discussion channel.
//!
//! The channel model has two legs. The wiretap leg carries codewords of `N`
//! components over `Σ = F_q^u`; an adversary reads the components in a set
//! `S_r` and adds errors on a set `S_w`, with `|S_r| ≤ ⌊ρ_r·N⌋` and
//! `|S_w| ≤ ⌊ρ_w·N⌋`. The discussion leg is authenticated and error-free in
//! both directions, but every bit of it is public. Secure transmission is
//! possible whenever the touched fraction `ρ = |S_r ∪ S_w|/N` is below one,
//! even when `ρ_r + ρ_w` exceeds one.
//!
//! The crate provides:
//!
//! * exact prime-field arithmetic ([`field`]) and the polynomial hash family
//!   and Reed–Solomon-style extractor built on it ([`hash`], [`extractor`]);
//! * a transcript-recording channel engine ([`channel`]) with pluggable
//!   adversary strategies ([`adversary`]);
//! * the three-message-round transmission protocol ([`protocol`]);
//! * measurement utilities, bound calculators, an exhaustive secrecy
//!   verifier and a Monte Carlo reliability estimator ([`analysis`]);
//! * conversion between channel transcripts and per-wire secure message
//!   transmission transcripts ([`smt`]).

pub mod adversary;
pub mod analysis;
pub mod bits;
pub mod channel;
pub mod extractor;
pub mod field;
pub mod hash;
pub mod protocol;
pub mod smt;
pub mod tape;

pub use field::{FieldElement, FieldError, PrimeModulus};
pub use protocol::{Message, ProtocolConfig, ProtocolError};
