//! The three-message-round transmission protocol.
//!
//! Round 1 (wiretap, Alice→Bob): Alice sends `N` components, each holding
//! `u−1` uniform field elements `r_i` plus a uniform mask `β_i`.
//!
//! Round 2 (discussion, Bob→Alice): Bob draws a hash key `α_i` per
//! component and publishes every key together with the tag
//! `t_i = hash_{α_i}(r'_i) + β'_i` over his received values.
//!
//! Round 3 (discussion, Alice→Bob): Alice recomputes each tag from her own
//! values and marks the components that agree in a verification vector `v`.
//! She extracts a key `k` of `ℓ` elements from the verified `r_i`, publishes
//! `c_i = k_i + m_i` and `v`. Bob extracts the same key from his received
//! values on the verified positions and recovers `m'_i = c_i − k'_i`.
//!
//! Discussion payloads are bit-exact: each field element is a fixed-width
//! big-endian integer of `⌈log₂ q⌉` bits; round 2 carries the key block then
//! the tag block; round 3 carries the ciphertext block then `v` as `N` raw
//! bits.

use num_rational::Ratio;
use thiserror::Error;

use crate::adversary::{AdversaryConfig, AdversaryStrategy};
use crate::bits::BitString;
use crate::channel::{
    awtp_transmit, pd_send, Codeword, Direction, Party, ReadWriteSets, Transcript,
    TranscriptContext,
};
use crate::extractor::{extract, ExtractorError};
use crate::field::{FieldElement, PrimeModulus};
use crate::hash::{hash, HashInput, HashKey};
use crate::tape::FieldSampler;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProtocolError {
    #[error("component width u must be at least 2, got {0}")]
    WidthTooSmall(usize),
    #[error("codeword length N must be positive")]
    ZeroLength,
    #[error("{name} = {value} is outside [0, 1]")]
    RateOutOfRange { name: &'static str, value: String },
    #[error("declared rho = {rho} outside [max(rho_r, rho_w), min(1, rho_r + rho_w)] = [{lo}, {hi}]")]
    InconsistentRho {
        rho: String,
        lo: String,
        hi: String,
    },
    #[error("derived message length is zero; grow N or u, or shrink rho")]
    MessageLengthZero,
    #[error("modulus {q} too small: this configuration needs q >= {needed}")]
    ModulusTooSmall { q: u64, needed: u64 },
    #[error("message has {got} elements, configuration expects {expected}")]
    MessageLengthMismatch { expected: usize, got: usize },
    #[error("message element outside the configured field")]
    MessageModulusMismatch,
    #[error("{which} payload malformed: expected {expected} bits, got {got}")]
    MalformedPayload {
        which: &'static str,
        expected: usize,
        got: usize,
    },
    /// Fewer than `ℓ` unread uniform elements survive verification. Not
    /// reachable while the adversary stays inside its write budget.
    #[error("insufficient verified entropy: (u-1)*s = {available} < l = {needed}")]
    InsufficientVerifiedEntropy { available: usize, needed: usize },
    #[error("transcript does not have the 1 wiretap + 2 discussion shape")]
    UnexpectedTranscriptShape,
    #[error(transparent)]
    Channel(#[from] crate::channel::ChannelError),
    #[error(transparent)]
    Extractor(#[from] ExtractorError),
}

/// All parameters of one protocol instance. The single source of truth:
/// everything else (tape lengths, payload widths, bounds) derives from it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ProtocolConfig {
    n: usize,
    u: usize,
    q: PrimeModulus,
    rho_r: Ratio<u64>,
    rho_w: Ratio<u64>,
    rho: Ratio<u64>,
    ell: usize,
}

impl ProtocolConfig {
    /// Builds a configuration for codewords of `n` components of `u` field
    /// elements, against read/write budgets `rho_r`/`rho_w` and a declared
    /// touched-fraction budget `rho`. Picks the smallest modulus above
    /// `2·u·n²` and the longest message the secrecy condition allows,
    /// `ℓ = ⌊(u−1)(1−ρ)n⌋`.
    pub fn new(
        n: usize,
        u: usize,
        rho_r: Ratio<u64>,
        rho_w: Ratio<u64>,
        rho: Ratio<u64>,
    ) -> Result<ProtocolConfig, ProtocolError> {
        if n == 0 {
            return Err(ProtocolError::ZeroLength);
        }
        if u < 2 {
            return Err(ProtocolError::WidthTooSmall(u));
        }
        let one = Ratio::from_integer(1u64);
        for (name, value) in [("rho_r", rho_r), ("rho_w", rho_w), ("rho", rho)] {
            if value > one {
                return Err(ProtocolError::RateOutOfRange {
                    name,
                    value: value.to_string(),
                });
            }
        }
        let lo = rho_r.max(rho_w);
        let hi = (rho_r + rho_w).min(one);
        if rho < lo || rho > hi {
            return Err(ProtocolError::InconsistentRho {
                rho: rho.to_string(),
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        let ell = secrecy_bound(n, u, rho);
        if ell == 0 {
            return Err(ProtocolError::MessageLengthZero);
        }
        let config = ProtocolConfig {
            n,
            u,
            q: PrimeModulus::select(u as u64, n as u64),
            rho_r,
            rho_w,
            rho,
            ell,
        };
        config.check_modulus()?;
        Ok(config)
    }

    /// Builds a configuration with every knob explicit, validating only
    /// structural feasibility — not the secrecy condition and not the
    /// `q > 2·u·n²` threshold. This is the entry point for enumeration-scale
    /// experiments and deliberate negative controls.
    pub fn explicit(
        n: usize,
        u: usize,
        q: PrimeModulus,
        rho_r: Ratio<u64>,
        rho_w: Ratio<u64>,
        rho: Ratio<u64>,
        ell: usize,
    ) -> Result<ProtocolConfig, ProtocolError> {
        if n == 0 {
            return Err(ProtocolError::ZeroLength);
        }
        if u < 2 {
            return Err(ProtocolError::WidthTooSmall(u));
        }
        if ell == 0 {
            return Err(ProtocolError::MessageLengthZero);
        }
        let one = Ratio::from_integer(1u64);
        for (name, value) in [("rho_r", rho_r), ("rho_w", rho_w), ("rho", rho)] {
            if value > one {
                return Err(ProtocolError::RateOutOfRange {
                    name,
                    value: value.to_string(),
                });
            }
        }
        let lo = rho_r.max(rho_w);
        let hi = (rho_r + rho_w).min(one);
        if rho < lo || rho > hi {
            return Err(ProtocolError::InconsistentRho {
                rho: rho.to_string(),
                lo: lo.to_string(),
                hi: hi.to_string(),
            });
        }
        let config = ProtocolConfig {
            n,
            u,
            q,
            rho_r,
            rho_w,
            rho,
            ell,
        };
        config.check_modulus()?;
        Ok(config)
    }

    /// Replaces the modulus. The protocol wants `q > 2·u·n²`; smaller
    /// primes are accepted as long as every reachable extraction fits
    /// (`q ≥ n(u−1) + ℓ` and `q ≥ u`), which is what exhaustive-enumeration
    /// experiments at tiny `q` rely on.
    pub fn with_modulus(mut self, q: PrimeModulus) -> Result<ProtocolConfig, ProtocolError> {
        self.q = q;
        self.check_modulus()?;
        Ok(self)
    }

    /// Forces a message length, possibly beyond the secrecy condition.
    /// Lengths above `⌊(u−1)(1−ρ)n⌋` lose the secrecy guarantee and exist
    /// for negative controls; [`ProtocolConfig::satisfies_secrecy_condition`]
    /// reports which side of the line a configuration is on.
    pub fn with_message_len(mut self, ell: usize) -> Result<ProtocolConfig, ProtocolError> {
        if ell == 0 {
            return Err(ProtocolError::MessageLengthZero);
        }
        self.ell = ell;
        self.check_modulus()?;
        Ok(self)
    }

    fn check_modulus(&self) -> Result<(), ProtocolError> {
        let needed = (self.n as u64) * (self.u as u64 - 1) + self.ell as u64;
        let needed = needed.max(self.u as u64);
        if self.q.get() < needed {
            return Err(ProtocolError::ModulusTooSmall {
                q: self.q.get(),
                needed,
            });
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn u(&self) -> usize {
        self.u
    }

    pub fn q(&self) -> PrimeModulus {
        self.q
    }

    pub fn rho_r(&self) -> Ratio<u64> {
        self.rho_r
    }

    pub fn rho_w(&self) -> Ratio<u64> {
        self.rho_w
    }

    pub fn rho(&self) -> Ratio<u64> {
        self.rho
    }

    /// Message length `ℓ` in field elements.
    pub fn message_len(&self) -> usize {
        self.ell
    }

    /// Longest message the secrecy condition allows: `⌊(u−1)(1−ρ)n⌋`.
    pub fn secrecy_bound(&self) -> usize {
        secrecy_bound(self.n, self.u, self.rho)
    }

    pub fn satisfies_secrecy_condition(&self) -> bool {
        self.ell <= self.secrecy_bound()
    }

    /// Whether `q` clears the protocol's own threshold `2·u·n²`.
    pub fn meets_modulus_constraint(&self) -> bool {
        self.q.get() > 2 * self.u as u64 * (self.n as u64).pow(2)
    }

    /// Information rate `ℓ/(u·n)` in field elements per field element.
    pub fn rate(&self) -> Ratio<u64> {
        Ratio::new(self.ell as u64, (self.u * self.n) as u64)
    }

    /// Decoding-failure bound `u·n/q` (may exceed 1 at toy moduli).
    pub fn reliability_bound(&self) -> f64 {
        (self.u as f64 * self.n as f64) / self.q.get() as f64
    }

    /// Number of field elements Alice draws in round 1.
    pub fn alice_tape_len(&self) -> usize {
        self.n * self.u
    }

    /// Number of field elements Bob draws in round 2.
    pub fn bob_tape_len(&self) -> usize {
        self.n
    }

    pub fn context(&self) -> TranscriptContext {
        TranscriptContext {
            n: self.n,
            u: self.u,
            q: self.q,
            rho_r: self.rho_r,
            rho_w: self.rho_w,
        }
    }
}

fn secrecy_bound(n: usize, u: usize, rho: Ratio<u64>) -> usize {
    let one = Ratio::from_integer(1u64);
    let bound = Ratio::from_integer((u - 1) as u64) * (one - rho) * Ratio::from_integer(n as u64);
    bound.to_integer() as usize
}

/// A message of exactly `ℓ` field elements.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Message {
    elements: Vec<FieldElement>,
}

impl Message {
    pub fn new(
        config: &ProtocolConfig,
        elements: Vec<FieldElement>,
    ) -> Result<Message, ProtocolError> {
        if elements.len() != config.ell {
            return Err(ProtocolError::MessageLengthMismatch {
                expected: config.ell,
                got: elements.len(),
            });
        }
        if elements.iter().any(|e| e.modulus() != config.q) {
            return Err(ProtocolError::MessageModulusMismatch);
        }
        Ok(Message { elements })
    }

    pub fn from_values(config: &ProtocolConfig, values: &[u64]) -> Result<Message, ProtocolError> {
        Message::new(config, values.iter().map(|&v| config.q.element(v)).collect())
    }

    /// Draws a uniform message.
    pub fn uniform(config: &ProtocolConfig, tape: &mut dyn FieldSampler) -> Message {
        Message {
            elements: (0..config.ell).map(|_| tape.draw(config.q)).collect(),
        }
    }

    pub fn elements(&self) -> &[FieldElement] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Alice's per-component randomness `r_i` and mask `β_i`, plus what round 3
/// derives from them.
#[derive(Debug, Clone)]
pub struct AliceState {
    randomness: Vec<Vec<FieldElement>>,
    masks: Vec<FieldElement>,
    verification: Option<Vec<bool>>,
    key: Option<Vec<FieldElement>>,
}

impl AliceState {
    /// Round 1: draw all `u·N` coordinates (per component: `r_{i,1} …
    /// r_{i,u−1}`, then `β_i`) and form the codeword `c_i = (r_i, β_i)`.
    pub fn round1(
        config: &ProtocolConfig,
        tape: &mut dyn FieldSampler,
    ) -> (AliceState, Codeword) {
        let mut randomness = Vec::with_capacity(config.n);
        let mut masks = Vec::with_capacity(config.n);
        let mut symbols = Vec::with_capacity(config.n);
        for _ in 0..config.n {
            let r: Vec<FieldElement> = (0..config.u - 1).map(|_| tape.draw(config.q)).collect();
            let beta = tape.draw(config.q);
            let mut symbol = r.clone();
            symbol.push(beta);
            randomness.push(r);
            masks.push(beta);
            symbols.push(symbol);
        }
        let codeword = Codeword::new(symbols).expect("round 1 builds a well-formed codeword");
        (
            AliceState {
                randomness,
                masks,
                verification: None,
                key: None,
            },
            codeword,
        )
    }

    /// Round 3: check every published tag against her own values, extract
    /// the key from the verified components and publish the ciphertext plus
    /// the verification vector.
    pub fn round3(
        &mut self,
        config: &ProtocolConfig,
        round2_bits: &BitString,
        message: &Message,
    ) -> Result<BitString, ProtocolError> {
        if message.len() != config.ell {
            return Err(ProtocolError::MessageLengthMismatch {
                expected: config.ell,
                got: message.len(),
            });
        }
        let (keys, tags) = parse_round2(config, round2_bits)?;
        let verification: Vec<bool> = (0..config.n)
            .map(|i| {
                let input = HashInput::new(self.randomness[i].clone())
                    .expect("config keeps 1 <= u-1 <= q-1");
                hash(HashKey::new(keys[i]), &input) + self.masks[i] == tags[i]
            })
            .collect();
        let key = derive_key(config, &self.randomness, &verification)?;
        let cipher: Vec<FieldElement> = key
            .iter()
            .zip(message.elements())
            .map(|(&k, &m)| k + m)
            .collect();
        let bits = encode_round3(config, &cipher, &verification);
        self.verification = Some(verification);
        self.key = Some(key);
        Ok(bits)
    }

    /// The verification vector from round 3, once computed.
    pub fn verification(&self) -> Option<&[bool]> {
        self.verification.as_deref()
    }

    /// The extracted key from round 3, once computed.
    pub fn key(&self) -> Option<&[FieldElement]> {
        self.key.as_deref()
    }
}

/// Bob's received word and round-2 draws.
#[derive(Debug, Clone)]
pub struct BobState {
    received: Codeword,
    hash_keys: Vec<FieldElement>,
    tags: Vec<FieldElement>,
}

impl BobState {
    /// Round 2: draw one hash key per component and tag the received
    /// values: `t_i = hash_{α_i}(r'_i) + β'_i`.
    pub fn round2(
        config: &ProtocolConfig,
        received: Codeword,
        tape: &mut dyn FieldSampler,
    ) -> (BobState, BitString) {
        let hash_keys: Vec<FieldElement> = (0..config.n).map(|_| tape.draw(config.q)).collect();
        let tags: Vec<FieldElement> = (0..config.n)
            .map(|i| {
                let symbol = received.symbol(i);
                let input = HashInput::new(symbol[..config.u - 1].to_vec())
                    .expect("config keeps 1 <= u-1 <= q-1");
                hash(HashKey::new(hash_keys[i]), &input) + symbol[config.u - 1]
            })
            .collect();
        let bits = encode_round2(config, &hash_keys, &tags);
        (
            BobState {
                received,
                hash_keys,
                tags,
            },
            bits,
        )
    }

    pub fn hash_keys(&self) -> &[FieldElement] {
        &self.hash_keys
    }

    pub fn tags(&self) -> &[FieldElement] {
        &self.tags
    }

    /// Final step: extract the key over the received values selected by the
    /// published verification vector and unmask the ciphertext.
    pub fn decode(
        &self,
        config: &ProtocolConfig,
        round3_bits: &BitString,
    ) -> Result<Message, ProtocolError> {
        decode_received(config, &self.received, round3_bits)
    }
}

/// Bob's decoder as a pure function of received data: the wiretap word and
/// the round-3 payload. Also usable to re-decode a recorded transcript.
pub fn decode_received(
    config: &ProtocolConfig,
    received: &Codeword,
    round3_bits: &BitString,
) -> Result<Message, ProtocolError> {
    let (cipher, verification) = parse_round3(config, round3_bits)?;
    let randomness: Vec<Vec<FieldElement>> = (0..config.n)
        .map(|i| received.symbol(i)[..config.u - 1].to_vec())
        .collect();
    let key = derive_key(config, &randomness, &verification)?;
    let elements = cipher
        .iter()
        .zip(&key)
        .map(|(&c, &k)| c - k)
        .collect();
    Ok(Message { elements })
}

/// Concatenates the `r` vectors of the selected components and extracts
/// `ℓ` elements from them.
fn derive_key(
    config: &ProtocolConfig,
    randomness: &[Vec<FieldElement>],
    selected: &[bool],
) -> Result<Vec<FieldElement>, ProtocolError> {
    let picked: Vec<FieldElement> = randomness
        .iter()
        .zip(selected)
        .filter(|(_, &keep)| keep)
        .flat_map(|(r, _)| r.iter().copied())
        .collect();
    if picked.len() < config.ell {
        return Err(ProtocolError::InsufficientVerifiedEntropy {
            available: picked.len(),
            needed: config.ell,
        });
    }
    Ok(extract(&picked, config.ell)?)
}

/// Round-2 payload: the key block then the tag block, `2N` elements.
pub fn encode_round2(
    config: &ProtocolConfig,
    hash_keys: &[FieldElement],
    tags: &[FieldElement],
) -> BitString {
    let mut bits = BitString::new();
    for &alpha in hash_keys {
        bits.push_element(alpha);
    }
    for &t in tags {
        bits.push_element(t);
    }
    debug_assert_eq!(bits.len(), 2 * config.n * config.q.bit_width());
    bits
}

pub fn parse_round2(
    config: &ProtocolConfig,
    bits: &BitString,
) -> Result<(Vec<FieldElement>, Vec<FieldElement>), ProtocolError> {
    let w = config.q.bit_width();
    let expected = 2 * config.n * w;
    if bits.len() != expected {
        return Err(ProtocolError::MalformedPayload {
            which: "round 2",
            expected,
            got: bits.len(),
        });
    }
    let element = |slot: usize| bits.element_at(slot * w, config.q);
    let hash_keys = (0..config.n).map(element).collect();
    let tags = (config.n..2 * config.n).map(element).collect();
    Ok((hash_keys, tags))
}

/// Round-3 payload: `ℓ` ciphertext elements then `N` raw verification bits.
pub fn encode_round3(
    config: &ProtocolConfig,
    cipher: &[FieldElement],
    verification: &[bool],
) -> BitString {
    let mut bits = BitString::new();
    for &c in cipher {
        bits.push_element(c);
    }
    for &v in verification {
        bits.push_bit(v);
    }
    debug_assert_eq!(bits.len(), config.ell * config.q.bit_width() + config.n);
    bits
}

pub fn parse_round3(
    config: &ProtocolConfig,
    bits: &BitString,
) -> Result<(Vec<FieldElement>, Vec<bool>), ProtocolError> {
    let w = config.q.bit_width();
    let expected = config.ell * w + config.n;
    if bits.len() != expected {
        return Err(ProtocolError::MalformedPayload {
            which: "round 3",
            expected,
            got: bits.len(),
        });
    }
    let cipher = (0..config.ell)
        .map(|slot| bits.element_at(slot * w, config.q))
        .collect();
    let verification = (0..config.n)
        .map(|i| bits.bit(config.ell * w + i))
        .collect();
    Ok((cipher, verification))
}

/// Runs one full execution against a fresh instance of the configured
/// adversary and returns Bob's output with the transcript.
pub fn run_protocol(
    config: &ProtocolConfig,
    message: &Message,
    adversary: &AdversaryConfig,
    alice_tape: &mut dyn FieldSampler,
    bob_tape: &mut dyn FieldSampler,
) -> Result<(Message, Transcript), ProtocolError> {
    let mut strategy = adversary.instantiate();
    run_protocol_with(
        config,
        message,
        adversary.sets(),
        &mut strategy,
        alice_tape,
        bob_tape,
    )
}

/// Runs one full execution against a caller-supplied strategy.
pub fn run_protocol_with(
    config: &ProtocolConfig,
    message: &Message,
    sets: &ReadWriteSets,
    strategy: &mut dyn AdversaryStrategy,
    alice_tape: &mut dyn FieldSampler,
    bob_tape: &mut dyn FieldSampler,
) -> Result<(Message, Transcript), ProtocolError> {
    if message.len() != config.ell {
        return Err(ProtocolError::MessageLengthMismatch {
            expected: config.ell,
            got: message.len(),
        });
    }
    let mut transcript = Transcript::new(config.context(), sets.clone());

    let (mut alice, codeword) = AliceState::round1(config, alice_tape);
    let received = awtp_transmit(Party::Alice, &codeword, strategy, &mut transcript)?;

    let (bob, round2_bits) = BobState::round2(config, received, bob_tape);
    let round2_bits = pd_send(round2_bits, Direction::BobToAlice, strategy, &mut transcript);

    let round3_bits = alice.round3(config, &round2_bits, message)?;
    let round3_bits = pd_send(round3_bits, Direction::AliceToBob, strategy, &mut transcript);

    let decoded = bob.decode(config, &round3_bits)?;

    // Components the adversary never wrote to always verify, so the count
    // of verified components is at least N − |S_w| in every execution.
    let verified = alice
        .verification()
        .expect("round 3 ran")
        .iter()
        .filter(|&&v| v)
        .count();
    assert!(
        verified >= config.n - sets.write().len(),
        "verified-set lower bound violated: s={verified}"
    );
    assert!(
        config.q.get() >= (verified * (config.u - 1) + config.ell) as u64,
        "extraction precondition violated"
    );

    Ok((decoded, transcript))
}

/// Re-decodes a recorded execution from its transcript alone.
pub fn decode_from_transcript(
    config: &ProtocolConfig,
    transcript: &Transcript,
) -> Result<Message, ProtocolError> {
    let received = transcript.awtp_received();
    let pd = transcript.pd_messages();
    let shape_ok = received.len() == 1
        && pd.len() == 2
        && pd[0].direction == Direction::BobToAlice
        && pd[1].direction == Direction::AliceToBob;
    if !shape_ok {
        return Err(ProtocolError::UnexpectedTranscriptShape);
    }
    decode_received(config, received[0], &pd[1].bits)
}
