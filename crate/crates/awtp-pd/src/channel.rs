//! Simulated one-way adversarial wiretap channel and two-way authenticated
//! public-discussion channel, with full transcript recording.
//!
//! One `Transcript` belongs to one execution. The wiretap leg reveals the
//! components in the adversary's read set one by one in ascending index
//! order; the error for component `j` is committed before component `j+1`
//! is revealed. The discussion leg delivers bits unmodified but appends
//! every payload to the adversary's view.
//!
//! Transcript files are length-prefixed records. Field elements are packed
//! as fixed-width big-endian unsigned integers of `⌈log₂ q⌉` bits; each
//! codeword is padded to a byte boundary; discussion payloads are raw bit
//! strings.

use std::collections::BTreeSet;

use num_rational::Ratio;
use thiserror::Error;

use crate::adversary::{AdversaryStrategy, WriteDecision};
use crate::bits::BitString;
use crate::field::{FieldElement, PrimeModulus};
use crate::tape::SeededTape;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ChannelError {
    /// The wiretap channel is one-way and can only be used by Alice.
    #[error("the wiretap channel is one-way; Bob cannot send on it")]
    AwtpFromBob,
    #[error("codeword shape mismatch: expected {expected_n}x{expected_u}, got {got_n}x{got_u}")]
    CodewordShape {
        expected_n: usize,
        expected_u: usize,
        got_n: usize,
        got_u: usize,
    },
    /// The adversary wrote outside its write set; the execution aborts.
    #[error("strategy violation: nonzero error at component {index} outside the write set")]
    SupportViolation { index: usize },
    #[error("strategy violation: replacement symbol at component {index} has wrong shape")]
    BadReplacement { index: usize },
    #[error("{what} set of size {size} exceeds budget {budget} for N={n}")]
    BudgetViolation {
        what: &'static str,
        size: usize,
        budget: usize,
        n: usize,
    },
    #[error("set index {index} out of range for N={n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("empty codeword")]
    EmptyCodeword,
}

/// Decode errors for serialized transcripts.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CodecError {
    #[error("bad magic; not a recognized transcript file")]
    BadMagic,
    #[error("truncated input while reading {0}")]
    Truncated(&'static str),
    #[error("invalid field in transcript: {0}")]
    Invalid(String),
}

/// Which party sends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Party {
    Alice,
    Bob,
}

/// Direction of a discussion-channel message.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    AliceToBob,
    BobToAlice,
}

/// The adversary's read set `S_r` and write set `S_w` over `[N]`, with the
/// derived partition into read-only, read-write, write-only and untouched
/// components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReadWriteSets {
    n: usize,
    read: BTreeSet<usize>,
    write: BTreeSet<usize>,
}

impl ReadWriteSets {
    pub fn new(
        n: usize,
        read: BTreeSet<usize>,
        write: BTreeSet<usize>,
    ) -> Result<ReadWriteSets, ChannelError> {
        for &i in read.iter().chain(write.iter()) {
            if i >= n {
                return Err(ChannelError::IndexOutOfRange { index: i, n });
            }
        }
        Ok(ReadWriteSets { n, read, write })
    }

    /// Restricted form: one set used for both reading and writing.
    pub fn restricted(n: usize, set: BTreeSet<usize>) -> Result<ReadWriteSets, ChannelError> {
        ReadWriteSets::new(n, set.clone(), set)
    }

    /// Budget sizes `⌊ρ_r·N⌋` and `⌊ρ_w·N⌋`.
    pub fn budget_sizes(n: usize, rho_r: Ratio<u64>, rho_w: Ratio<u64>) -> (usize, usize) {
        let f = |rho: Ratio<u64>| (rho * Ratio::from_integer(n as u64)).floor().to_integer() as usize;
        (f(rho_r), f(rho_w))
    }

    /// Random sets of exactly the budget sizes. In restricted mode one set
    /// serves both roles, sized to the smaller budget.
    pub fn random(
        n: usize,
        rho_r: Ratio<u64>,
        rho_w: Ratio<u64>,
        restricted: bool,
        tape: &mut SeededTape,
    ) -> Result<ReadWriteSets, ChannelError> {
        let (r_size, w_size) = ReadWriteSets::budget_sizes(n, rho_r, rho_w);
        if restricted {
            let shared = random_subset(n, r_size.min(w_size), tape);
            ReadWriteSets::new(n, shared.clone(), shared)
        } else {
            let read = random_subset(n, r_size, tape);
            let write = random_subset(n, w_size, tape);
            ReadWriteSets::new(n, read, write)
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn read(&self) -> &BTreeSet<usize> {
        &self.read
    }

    pub fn write(&self) -> &BTreeSet<usize> {
        &self.write
    }

    pub fn is_restricted(&self) -> bool {
        self.read == self.write
    }

    /// Read-only components `S_r \ S_w`.
    pub fn read_only(&self) -> BTreeSet<usize> {
        self.read.difference(&self.write).copied().collect()
    }

    /// Components both read and written, `S_r ∩ S_w`.
    pub fn read_write(&self) -> BTreeSet<usize> {
        self.read.intersection(&self.write).copied().collect()
    }

    /// Write-only components `S_w \ S_r`.
    pub fn write_only(&self) -> BTreeSet<usize> {
        self.write.difference(&self.read).copied().collect()
    }

    /// Components neither read nor written.
    pub fn untouched(&self) -> BTreeSet<usize> {
        (0..self.n)
            .filter(|i| !self.read.contains(i) && !self.write.contains(i))
            .collect()
    }

    pub fn union_size(&self) -> usize {
        self.read.union(&self.write).count()
    }

    /// The touched fraction `ρ = |S_r ∪ S_w| / N`.
    pub fn union_fraction(&self) -> Ratio<u64> {
        Ratio::new(self.union_size() as u64, self.n as u64)
    }

    /// Whether both sets fit their budgets.
    pub fn fits_budgets(&self, rho_r: Ratio<u64>, rho_w: Ratio<u64>) -> bool {
        let (r_budget, w_budget) = ReadWriteSets::budget_sizes(self.n, rho_r, rho_w);
        self.read.len() <= r_budget && self.write.len() <= w_budget
    }
}

fn random_subset(n: usize, size: usize, tape: &mut SeededTape) -> BTreeSet<usize> {
    // Partial Fisher-Yates over the index list.
    let mut indices: Vec<usize> = (0..n).collect();
    for i in 0..size.min(n) {
        let j = i + (tape.next_u64() as usize) % (n - i);
        indices.swap(i, j);
    }
    indices.into_iter().take(size).collect()
}

/// A codeword of `N` components, each `u` field elements over one modulus.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Codeword {
    symbols: Vec<Vec<FieldElement>>,
}

impl Codeword {
    pub fn new(symbols: Vec<Vec<FieldElement>>) -> Result<Codeword, ChannelError> {
        let first = symbols.first().ok_or(ChannelError::EmptyCodeword)?;
        let u = first.len();
        let n = symbols.len();
        if u == 0 || symbols.iter().any(|s| s.len() != u) {
            return Err(ChannelError::CodewordShape {
                expected_n: n,
                expected_u: u.max(1),
                got_n: n,
                got_u: 0,
            });
        }
        Ok(Codeword { symbols })
    }

    pub fn zero(n: usize, u: usize, q: PrimeModulus) -> Codeword {
        Codeword {
            symbols: vec![vec![q.zero(); u]; n],
        }
    }

    /// Number of components `N`.
    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Elements per component `u`.
    pub fn width(&self) -> usize {
        self.symbols[0].len()
    }

    pub fn symbol(&self, i: usize) -> &[FieldElement] {
        &self.symbols[i]
    }

    pub fn symbols(&self) -> &[Vec<FieldElement>] {
        &self.symbols
    }

    pub fn set_symbol(&mut self, i: usize, symbol: Vec<FieldElement>) {
        assert_eq!(symbol.len(), self.width());
        self.symbols[i] = symbol;
    }

    /// Componentwise sum; shapes must agree.
    pub fn add(&self, rhs: &Codeword) -> Codeword {
        assert_eq!(self.len(), rhs.len());
        assert_eq!(self.width(), rhs.width());
        Codeword {
            symbols: self
                .symbols
                .iter()
                .zip(&rhs.symbols)
                .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| x + y).collect())
                .collect(),
        }
    }

    /// Componentwise difference; shapes must agree.
    pub fn sub(&self, rhs: &Codeword) -> Codeword {
        assert_eq!(self.len(), rhs.len());
        assert_eq!(self.width(), rhs.width());
        Codeword {
            symbols: self
                .symbols
                .iter()
                .zip(&rhs.symbols)
                .map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| x - y).collect())
                .collect(),
        }
    }

    /// Indices of nonzero components.
    pub fn support(&self) -> BTreeSet<usize> {
        self.symbols
            .iter()
            .enumerate()
            .filter(|(_, s)| s.iter().any(|e| !e.is_zero()))
            .map(|(i, _)| i)
            .collect()
    }

    /// Hamming weight over components.
    pub fn weight(&self) -> usize {
        self.support().len()
    }
}

/// One discussion-channel payload.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PdMessage {
    pub direction: Direction,
    /// Sequence number among discussion messages of this execution.
    pub index: usize,
    pub bits: BitString,
}

/// Static execution context: dimensions, modulus and adversary budgets.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TranscriptContext {
    pub n: usize,
    pub u: usize,
    pub q: PrimeModulus,
    pub rho_r: Ratio<u64>,
    pub rho_w: Ratio<u64>,
}

/// One recorded channel use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Event {
    Awtp {
        sent: Codeword,
        received: Codeword,
        error: Codeword,
    },
    Pd(PdMessage),
}

/// Append-only record of everything sent in one execution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transcript {
    ctx: TranscriptContext,
    sets: ReadWriteSets,
    events: Vec<Event>,
}

impl Transcript {
    pub fn new(ctx: TranscriptContext, sets: ReadWriteSets) -> Transcript {
        assert_eq!(ctx.n, sets.len());
        Transcript {
            ctx,
            sets,
            events: Vec::new(),
        }
    }

    pub fn context(&self) -> &TranscriptContext {
        &self.ctx
    }

    pub fn sets(&self) -> &ReadWriteSets {
        &self.sets
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Number of wiretap-channel invocations `ℓ_c`.
    pub fn awtp_invocations(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, Event::Awtp { .. }))
            .count()
    }

    /// Number of discussion-channel invocations `ℓ_d`.
    pub fn pd_invocations(&self) -> usize {
        self.events
            .iter()
            .filter(|e| matches!(e, Event::Pd(_)))
            .count()
    }

    /// Message-round complexity as `(wiretap rounds, discussion rounds)`.
    pub fn message_rounds(&self) -> (usize, usize) {
        (self.awtp_invocations(), self.pd_invocations())
    }

    pub fn awtp_sent(&self) -> Vec<&Codeword> {
        self.events
            .iter()
            .filter_map(|e| match e {
                Event::Awtp { sent, .. } => Some(sent),
                _ => None,
            })
            .collect()
    }

    pub fn awtp_received(&self) -> Vec<&Codeword> {
        self.events
            .iter()
            .filter_map(|e| match e {
                Event::Awtp { received, .. } => Some(received),
                _ => None,
            })
            .collect()
    }

    pub fn errors(&self) -> Vec<&Codeword> {
        self.events
            .iter()
            .filter_map(|e| match e {
                Event::Awtp { error, .. } => Some(error),
                _ => None,
            })
            .collect()
    }

    pub fn pd_messages(&self) -> Vec<&PdMessage> {
        self.events
            .iter()
            .filter_map(|e| match e {
                Event::Pd(m) => Some(m),
                _ => None,
            })
            .collect()
    }

    /// Replays the transcript into the adversary's view: the read-set
    /// components of each sent codeword (ascending index) and every
    /// discussion bit, in observation order.
    pub fn adversary_view(&self) -> AdversaryView {
        let mut items = Vec::new();
        let mut invocation = 0usize;
        for event in &self.events {
            match event {
                Event::Awtp { sent, .. } => {
                    for &i in self.sets.read() {
                        items.push(ViewItem::Symbol {
                            invocation,
                            index: i,
                            symbol: sent.symbol(i).to_vec(),
                        });
                    }
                    invocation += 1;
                }
                Event::Pd(m) => items.push(ViewItem::Pd {
                    direction: m.direction,
                    bits: m.bits.clone(),
                }),
            }
        }
        AdversaryView { items }
    }

    /// Serializes to the length-prefixed binary format.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC_TRANSCRIPT);
        write_context(&mut out, &self.ctx);
        write_index_set(&mut out, self.sets.read());
        write_index_set(&mut out, self.sets.write());
        out.extend_from_slice(&(self.events.len() as u32).to_be_bytes());
        for event in &self.events {
            match event {
                Event::Awtp { sent, received, .. } => {
                    let mut payload = pack_codeword(sent);
                    payload.extend(pack_codeword(received));
                    out.push(0u8);
                    out.extend_from_slice(&(payload.len() as u32).to_be_bytes());
                    out.extend(payload);
                }
                Event::Pd(m) => {
                    let mut payload = Vec::new();
                    payload.push(match m.direction {
                        Direction::AliceToBob => 0u8,
                        Direction::BobToAlice => 1u8,
                    });
                    payload.extend_from_slice(&(m.bits.len() as u32).to_be_bytes());
                    payload.extend(m.bits.to_bytes());
                    out.push(1u8);
                    out.extend_from_slice(&(payload.len() as u32).to_be_bytes());
                    out.extend(payload);
                }
            }
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Transcript, CodecError> {
        let mut r = Reader::new(bytes);
        r.expect_magic(MAGIC_TRANSCRIPT)?;
        let ctx = read_context(&mut r)?;
        let read = read_index_set(&mut r)?;
        let write = read_index_set(&mut r)?;
        let sets = ReadWriteSets::new(ctx.n, read, write)
            .map_err(|e| CodecError::Invalid(e.to_string()))?;
        let count = r.u32("event count")? as usize;
        let mut events = Vec::with_capacity(count);
        let mut pd_index = 0usize;
        for _ in 0..count {
            let tag = r.u8("event tag")?;
            let len = r.u32("payload length")? as usize;
            let payload = r.bytes(len, "event payload")?;
            let mut pr = Reader::new(payload);
            match tag {
                0 => {
                    let sent = unpack_codeword(&mut pr, ctx.n, ctx.u, ctx.q)?;
                    let received = unpack_codeword(&mut pr, ctx.n, ctx.u, ctx.q)?;
                    let error = received.sub(&sent);
                    events.push(Event::Awtp {
                        sent,
                        received,
                        error,
                    });
                }
                1 => {
                    let direction = match pr.u8("direction")? {
                        0 => Direction::AliceToBob,
                        1 => Direction::BobToAlice,
                        d => return Err(CodecError::Invalid(format!("direction {d}"))),
                    };
                    let bit_len = pr.u32("bit length")? as usize;
                    let packed = pr.bytes((bit_len + 7) / 8, "pd bits")?;
                    events.push(Event::Pd(PdMessage {
                        direction,
                        index: pd_index,
                        bits: BitString::from_bytes(packed, bit_len),
                    }));
                    pd_index += 1;
                }
                t => return Err(CodecError::Invalid(format!("event tag {t}"))),
            }
        }
        let mut t = Transcript::new(ctx, sets);
        t.events = events;
        Ok(t)
    }

    pub(crate) fn push_event(&mut self, event: Event) {
        self.events.push(event);
    }
}

/// Everything the adversary saw, in observation order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AdversaryView {
    pub items: Vec<ViewItem>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ViewItem {
    Symbol {
        invocation: usize,
        index: usize,
        symbol: Vec<FieldElement>,
    },
    Pd {
        direction: Direction,
        bits: BitString,
    },
}

impl AdversaryView {
    /// Deterministic byte encoding, usable as a bucketing key.
    pub fn canonical_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        for item in &self.items {
            match item {
                ViewItem::Symbol {
                    invocation,
                    index,
                    symbol,
                } => {
                    out.push(0u8);
                    out.extend_from_slice(&(*invocation as u32).to_be_bytes());
                    out.extend_from_slice(&(*index as u32).to_be_bytes());
                    for e in symbol {
                        out.extend_from_slice(&e.value().to_be_bytes());
                    }
                }
                ViewItem::Pd { direction, bits } => {
                    out.push(1u8);
                    out.push(match direction {
                        Direction::AliceToBob => 0,
                        Direction::BobToAlice => 1,
                    });
                    out.extend_from_slice(&(bits.len() as u32).to_be_bytes());
                    out.extend(bits.to_bytes());
                }
            }
        }
        out
    }
}

/// Sends one codeword over the wiretap channel.
///
/// The adversary observes the read-set components in ascending index order
/// and commits a write decision per component before the next one is
/// revealed. The received word is `sent + error`; a nonzero error outside
/// the write set aborts the execution.
pub fn awtp_transmit(
    sender: Party,
    codeword: &Codeword,
    adversary: &mut dyn AdversaryStrategy,
    transcript: &mut Transcript,
) -> Result<Codeword, ChannelError> {
    if sender == Party::Bob {
        return Err(ChannelError::AwtpFromBob);
    }
    let ctx = *transcript.context();
    if codeword.len() != ctx.n || codeword.width() != ctx.u {
        return Err(ChannelError::CodewordShape {
            expected_n: ctx.n,
            expected_u: ctx.u,
            got_n: codeword.len(),
            got_u: codeword.width(),
        });
    }
    let sets = transcript.sets().clone();
    if !sets.fits_budgets(ctx.rho_r, ctx.rho_w) {
        let (r_budget, w_budget) = ReadWriteSets::budget_sizes(ctx.n, ctx.rho_r, ctx.rho_w);
        let (what, size, budget) = if sets.read().len() > r_budget {
            ("read", sets.read().len(), r_budget)
        } else {
            ("write", sets.write().len(), w_budget)
        };
        return Err(ChannelError::BudgetViolation {
            what,
            size,
            budget,
            n: ctx.n,
        });
    }

    adversary.begin_awtp(ctx.n, ctx.u, ctx.q);
    let mut error = Codeword::zero(ctx.n, ctx.u, ctx.q);
    for i in 0..ctx.n {
        if sets.read().contains(&i) {
            adversary.observe_component(i, codeword.symbol(i));
        }
        let e_i: Vec<FieldElement> = match adversary.decide(i) {
            WriteDecision::Keep => continue,
            WriteDecision::Add(e) => e,
            WriteDecision::Replace(new) => {
                if new.len() != ctx.u {
                    return Err(ChannelError::BadReplacement { index: i });
                }
                new.iter()
                    .zip(codeword.symbol(i))
                    .map(|(&fresh, &old)| fresh - old)
                    .collect()
            }
        };
        if e_i.len() != ctx.u {
            return Err(ChannelError::BadReplacement { index: i });
        }
        if e_i.iter().any(|e| !e.is_zero()) && !sets.write().contains(&i) {
            return Err(ChannelError::SupportViolation { index: i });
        }
        error.set_symbol(i, e_i);
    }

    let received = codeword.add(&error);
    transcript.push_event(Event::Awtp {
        sent: codeword.clone(),
        received: received.clone(),
        error,
    });
    Ok(received)
}

/// Sends bits over the public discussion channel: delivered unmodified,
/// recorded, and shown to the adversary.
pub fn pd_send(
    bits: BitString,
    direction: Direction,
    adversary: &mut dyn AdversaryStrategy,
    transcript: &mut Transcript,
) -> BitString {
    adversary.observe_pd(direction, &bits);
    let index = transcript.pd_invocations();
    transcript.push_event(Event::Pd(PdMessage {
        direction,
        index,
        bits: bits.clone(),
    }));
    bits
}

const MAGIC_TRANSCRIPT: &[u8; 8] = b"AWTPPD1T";
pub(crate) const MAGIC_WIRES: &[u8; 8] = b"AWTPPD1W";

pub(crate) fn write_context(out: &mut Vec<u8>, ctx: &TranscriptContext) {
    out.extend_from_slice(&(ctx.n as u32).to_be_bytes());
    out.extend_from_slice(&(ctx.u as u32).to_be_bytes());
    out.extend_from_slice(&ctx.q.get().to_be_bytes());
    for rho in [ctx.rho_r, ctx.rho_w] {
        out.extend_from_slice(&rho.numer().to_be_bytes());
        out.extend_from_slice(&rho.denom().to_be_bytes());
    }
}

pub(crate) fn read_context(r: &mut Reader<'_>) -> Result<TranscriptContext, CodecError> {
    let n = r.u32("n")? as usize;
    let u = r.u32("u")? as usize;
    let q = PrimeModulus::new(r.u64("q")?).map_err(|e| CodecError::Invalid(e.to_string()))?;
    let mut rhos = [Ratio::from_integer(0u64); 2];
    for rho in rhos.iter_mut() {
        let numer = r.u64("rho numerator")?;
        let denom = r.u64("rho denominator")?;
        if denom == 0 {
            return Err(CodecError::Invalid("zero rho denominator".into()));
        }
        *rho = Ratio::new(numer, denom);
    }
    Ok(TranscriptContext {
        n,
        u,
        q,
        rho_r: rhos[0],
        rho_w: rhos[1],
    })
}

pub(crate) fn write_index_set(out: &mut Vec<u8>, set: &BTreeSet<usize>) {
    out.extend_from_slice(&(set.len() as u32).to_be_bytes());
    for &i in set {
        out.extend_from_slice(&(i as u32).to_be_bytes());
    }
}

pub(crate) fn read_index_set(r: &mut Reader<'_>) -> Result<BTreeSet<usize>, CodecError> {
    let count = r.u32("set size")? as usize;
    let mut set = BTreeSet::new();
    for _ in 0..count {
        set.insert(r.u32("set index")? as usize);
    }
    Ok(set)
}

/// Packs all elements of a codeword contiguously at the modulus width,
/// padded to a byte boundary.
pub(crate) fn pack_codeword(c: &Codeword) -> Vec<u8> {
    let mut bits = BitString::new();
    for symbol in c.symbols() {
        for &e in symbol {
            bits.push_element(e);
        }
    }
    bits.to_bytes()
}

pub(crate) fn unpack_codeword(
    r: &mut Reader<'_>,
    n: usize,
    u: usize,
    q: PrimeModulus,
) -> Result<Codeword, CodecError> {
    let bit_len = n * u * q.bit_width();
    let bytes = r.bytes((bit_len + 7) / 8, "codeword")?;
    let bits = BitString::from_bytes(bytes, bit_len);
    let width = q.bit_width();
    let mut symbols = Vec::with_capacity(n);
    for i in 0..n {
        let mut symbol = Vec::with_capacity(u);
        for j in 0..u {
            let v = bits.uint_at((i * u + j) * width, width);
            if v >= q.get() {
                return Err(CodecError::Invalid(format!("element {v} >= q={q}")));
            }
            symbol.push(q.element(v));
        }
        symbols.push(symbol);
    }
    Codeword::new(symbols).map_err(|e| CodecError::Invalid(e.to_string()))
}

/// Cursor over a byte slice with descriptive truncation errors.
pub(crate) struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(data: &'a [u8]) -> Reader<'a> {
        Reader { data, pos: 0 }
    }

    pub(crate) fn expect_magic(&mut self, magic: &[u8; 8]) -> Result<(), CodecError> {
        let got = self.bytes(8, "magic").map_err(|_| CodecError::BadMagic)?;
        if got == magic {
            Ok(())
        } else {
            Err(CodecError::BadMagic)
        }
    }

    pub(crate) fn bytes(&mut self, len: usize, what: &'static str) -> Result<&'a [u8], CodecError> {
        if self.pos + len > self.data.len() {
            return Err(CodecError::Truncated(what));
        }
        let out = &self.data[self.pos..self.pos + len];
        self.pos += len;
        Ok(out)
    }

    pub(crate) fn u8(&mut self, what: &'static str) -> Result<u8, CodecError> {
        Ok(self.bytes(1, what)?[0])
    }

    pub(crate) fn u32(&mut self, what: &'static str) -> Result<u32, CodecError> {
        Ok(u32::from_be_bytes(self.bytes(4, what)?.try_into().unwrap()))
    }

    pub(crate) fn u64(&mut self, what: &'static str) -> Result<u64, CodecError> {
        Ok(u64::from_be_bytes(self.bytes(8, what)?.try_into().unwrap()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::adversary::{AdversaryConfig, AdversaryKind};
    use crate::tape::derive_seed;

    fn q5() -> PrimeModulus {
        PrimeModulus::new(5).unwrap()
    }

    fn ctx(n: usize, u: usize, q: PrimeModulus) -> TranscriptContext {
        TranscriptContext {
            n,
            u,
            q,
            rho_r: Ratio::new(1, 2),
            rho_w: Ratio::new(1, 2),
        }
    }

    fn codeword(q: PrimeModulus, rows: &[&[u64]]) -> Codeword {
        Codeword::new(
            rows.iter()
                .map(|row| row.iter().map(|&v| q.element(v)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn partition_of_index_space() {
        let sets = ReadWriteSets::new(
            6,
            [0usize, 1, 2].into_iter().collect(),
            [2usize, 3, 4].into_iter().collect(),
        )
        .unwrap();
        assert_eq!(sets.read_only(), [0, 1].into_iter().collect());
        assert_eq!(sets.read_write(), [2].into_iter().collect());
        assert_eq!(sets.write_only(), [3, 4].into_iter().collect());
        assert_eq!(sets.untouched(), [5].into_iter().collect());
        assert_eq!(sets.union_fraction(), Ratio::new(5, 6));
    }

    #[test]
    fn budget_sizes_floor() {
        assert_eq!(
            ReadWriteSets::budget_sizes(5, Ratio::new(1, 2), Ratio::new(1, 3)),
            (2, 1)
        );
    }

    #[test]
    fn bob_cannot_use_the_wiretap_channel() {
        let q = q5();
        let sets = ReadWriteSets::restricted(2, BTreeSet::new()).unwrap();
        let mut transcript = Transcript::new(ctx(2, 2, q), sets.clone());
        let cfg = AdversaryConfig::new(AdversaryKind::Passive, sets, derive_seed(0, 0, 0));
        let mut adversary = cfg.instantiate();
        let c = codeword(q, &[&[1, 2], &[3, 4]]);
        assert_eq!(
            awtp_transmit(Party::Bob, &c, &mut adversary, &mut transcript),
            Err(ChannelError::AwtpFromBob)
        );
    }

    #[test]
    fn passive_delivery_is_identity() {
        let q = q5();
        let sets = ReadWriteSets::restricted(2, [0usize].into_iter().collect()).unwrap();
        let mut transcript = Transcript::new(ctx(2, 2, q), sets.clone());
        let cfg = AdversaryConfig::new(AdversaryKind::Passive, sets, derive_seed(0, 0, 0));
        let mut adversary = cfg.instantiate();
        let c = codeword(q, &[&[1, 2], &[3, 4]]);
        let received = awtp_transmit(Party::Alice, &c, &mut adversary, &mut transcript).unwrap();
        assert_eq!(received, c);
        assert_eq!(transcript.errors()[0].weight(), 0);
        // View holds exactly the read components.
        let view = transcript.adversary_view();
        assert_eq!(view.items.len(), 1);
    }

    #[test]
    fn additive_error_on_write_set() {
        let q = q5();
        // S_w = {1}: the adversary adds x at component 1 only.
        struct AddAtOne(PrimeModulus);
        impl AdversaryStrategy for AddAtOne {
            fn begin_awtp(&mut self, _: usize, _: usize, _: PrimeModulus) {}
            fn observe_component(&mut self, _: usize, _: &[FieldElement]) {}
            fn decide(&mut self, index: usize) -> WriteDecision {
                if index == 1 {
                    WriteDecision::Add(vec![self.0.element(2), self.0.element(0)])
                } else {
                    WriteDecision::Keep
                }
            }
            fn observe_pd(&mut self, _: Direction, _: &BitString) {}
        }
        let sets = ReadWriteSets::new(4, BTreeSet::new(), [1usize].into_iter().collect()).unwrap();
        let mut transcript = Transcript::new(
            TranscriptContext {
                n: 4,
                u: 2,
                q,
                rho_r: Ratio::new(0, 1),
                rho_w: Ratio::new(1, 4),
            },
            sets,
        );
        let c = codeword(q, &[&[1, 1], &[2, 2], &[3, 3], &[4, 4]]);
        let mut adversary = AddAtOne(q);
        let received = awtp_transmit(Party::Alice, &c, &mut adversary, &mut transcript).unwrap();
        assert_eq!(received, codeword(q, &[&[1, 1], &[4, 2], &[3, 3], &[4, 4]]));
        assert_eq!(transcript.errors()[0].support(), [1].into_iter().collect());
    }

    #[test]
    fn support_violation_aborts() {
        let q = q5();
        struct Rogue(PrimeModulus);
        impl AdversaryStrategy for Rogue {
            fn begin_awtp(&mut self, _: usize, _: usize, _: PrimeModulus) {}
            fn observe_component(&mut self, _: usize, _: &[FieldElement]) {}
            fn decide(&mut self, _: usize) -> WriteDecision {
                WriteDecision::Add(vec![self.0.element(1), self.0.element(0)])
            }
            fn observe_pd(&mut self, _: Direction, _: &BitString) {}
        }
        let sets = ReadWriteSets::new(2, BTreeSet::new(), [1usize].into_iter().collect()).unwrap();
        let mut transcript = Transcript::new(ctx(2, 2, q), sets);
        let c = codeword(q, &[&[1, 2], &[3, 4]]);
        assert_eq!(
            awtp_transmit(Party::Alice, &c, &mut Rogue(q), &mut transcript),
            Err(ChannelError::SupportViolation { index: 0 })
        );
    }

    #[test]
    fn budget_violation_rejected() {
        let q = q5();
        // Budget allows one read component, the set claims two.
        let sets = ReadWriteSets::new(2, [0usize, 1].into_iter().collect(), BTreeSet::new()).unwrap();
        let mut transcript = Transcript::new(
            TranscriptContext {
                n: 2,
                u: 2,
                q,
                rho_r: Ratio::new(1, 2),
                rho_w: Ratio::new(0, 1),
            },
            sets.clone(),
        );
        let cfg = AdversaryConfig::new(AdversaryKind::Passive, sets, derive_seed(0, 0, 0));
        let mut adversary = cfg.instantiate();
        let c = codeword(q, &[&[1, 2], &[3, 4]]);
        assert!(matches!(
            awtp_transmit(Party::Alice, &c, &mut adversary, &mut transcript),
            Err(ChannelError::BudgetViolation { what: "read", .. })
        ));
    }

    #[test]
    fn pd_delivers_unmodified_and_is_seen() {
        let q = q5();
        let sets = ReadWriteSets::restricted(2, BTreeSet::new()).unwrap();
        let mut transcript = Transcript::new(ctx(2, 2, q), sets.clone());
        let cfg = AdversaryConfig::new(AdversaryKind::Passive, sets, derive_seed(0, 0, 0));
        let mut adversary = cfg.instantiate();
        let bits: BitString = "0101".parse().unwrap();
        let delivered = pd_send(bits.clone(), Direction::AliceToBob, &mut adversary, &mut transcript);
        assert_eq!(delivered, bits);
        let empty = pd_send(BitString::new(), Direction::BobToAlice, &mut adversary, &mut transcript);
        assert!(empty.is_empty());
        assert_eq!(transcript.pd_invocations(), 2);
        let view = transcript.adversary_view();
        assert_eq!(view.items.len(), 2);
        assert!(matches!(&view.items[0], ViewItem::Pd { direction: Direction::AliceToBob, bits: b } if *b == bits));
    }

    #[test]
    fn transcript_codec_round_trip() {
        let q = q5();
        let sets = ReadWriteSets::restricted(2, [0usize].into_iter().collect()).unwrap();
        let mut transcript = Transcript::new(ctx(2, 2, q), sets.clone());
        let cfg = AdversaryConfig::new(AdversaryKind::Substitution, sets, derive_seed(3, 2, 1));
        let mut adversary = cfg.instantiate();
        let c = codeword(q, &[&[1, 2], &[3, 4]]);
        awtp_transmit(Party::Alice, &c, &mut adversary, &mut transcript).unwrap();
        pd_send("011011".parse().unwrap(), Direction::BobToAlice, &mut adversary, &mut transcript);
        pd_send("10".parse().unwrap(), Direction::AliceToBob, &mut adversary, &mut transcript);

        let bytes = transcript.encode();
        let decoded = Transcript::decode(&bytes).unwrap();
        assert_eq!(decoded, transcript);
        assert_eq!(decoded.encode(), bytes);
        assert_eq!(
            decoded.adversary_view().canonical_bytes(),
            transcript.adversary_view().canonical_bytes()
        );
    }

    #[test]
    fn decode_rejects_garbage() {
        assert_eq!(Transcript::decode(b"not a transcript"), Err(CodecError::BadMagic));
    }

    #[test]
    fn received_equals_sent_plus_error() {
        let q = q5();
        let sets = ReadWriteSets::restricted(3, [0usize, 2].into_iter().collect()).unwrap();
        let mut transcript = Transcript::new(
            TranscriptContext {
                n: 3,
                u: 2,
                q,
                rho_r: Ratio::new(2, 3),
                rho_w: Ratio::new(2, 3),
            },
            sets.clone(),
        );
        let cfg = AdversaryConfig::new(AdversaryKind::Adv1Uniform, sets, derive_seed(9, 9, 9));
        let mut adversary = cfg.instantiate();
        let c = codeword(q, &[&[1, 2], &[3, 4], &[0, 1]]);
        let received = awtp_transmit(Party::Alice, &c, &mut adversary, &mut transcript).unwrap();
        match &transcript.events()[0] {
            Event::Awtp { sent, received: rec, error } => {
                assert_eq!(sent.add(error), *rec);
                assert_eq!(*rec, received);
                assert!(error.weight() <= 2);
            }
            _ => panic!("expected wiretap event"),
        }
    }
}
