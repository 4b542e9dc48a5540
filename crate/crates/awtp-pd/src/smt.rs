//! Conversion between restricted channel transcripts and per-wire
//! message-transmission transcripts.
//!
//! When the adversary's read and write sets coincide (`S_r = S_w = S`), a
//! wiretap execution is exactly an execution over `N` one-way wires with
//! the wires in `S` corrupted: wire `i` carries component `i` of each
//! codeword and discussion traffic is unchanged. The conversion is a
//! bijection; converting refuses transcripts with `S_r ≠ S_w` rather than
//! silently unioning the sets.

use std::collections::BTreeSet;

use num_rational::Ratio;
use thiserror::Error;

use crate::channel::{
    pack_codeword, read_context, read_index_set, unpack_codeword, write_context, write_index_set,
    Codeword, CodecError, Direction, Event, PdMessage, Reader, ReadWriteSets, Transcript,
    TranscriptContext, MAGIC_WIRES,
};
use crate::field::FieldElement;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SmtError {
    /// Only restricted executions (`S_r = S_w`) correspond to wire runs.
    #[error("transcript is not restricted: read and write sets differ")]
    NotRestricted,
    #[error("wire transcript is empty or wires disagree on shape")]
    AsymmetricWires,
    #[error("message carries no information")]
    ZeroMessage,
    #[error(transparent)]
    Codec(#[from] CodecError),
    #[error(transparent)]
    Channel(#[from] crate::channel::ChannelError),
}

/// One event on the wire side: a simultaneous send over all `N` wires, or a
/// discussion payload.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WireEvent {
    /// `sent[i]`/`received[i]` is the symbol carried by wire `i`.
    WireRound {
        sent: Vec<Vec<FieldElement>>,
        received: Vec<Vec<FieldElement>>,
    },
    Pd(PdMessage),
}

/// A one-way symmetric wire execution: `N` interchangeable wires from Alice
/// to Bob, a corrupted set of `t` wires, and the public discussion stream.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WireTranscript {
    ctx: TranscriptContext,
    corrupted: BTreeSet<usize>,
    events: Vec<WireEvent>,
}

impl WireTranscript {
    pub fn wires(&self) -> usize {
        self.ctx.n
    }

    /// Number of corrupted wires `t`.
    pub fn corrupted_count(&self) -> usize {
        self.corrupted.len()
    }

    pub fn corrupted(&self) -> &BTreeSet<usize> {
        &self.corrupted
    }

    pub fn context(&self) -> &TranscriptContext {
        &self.ctx
    }

    pub fn events(&self) -> &[WireEvent] {
        &self.events
    }

    /// The symbols sent down one wire, one entry per wire round.
    pub fn wire_stream(&self, wire: usize) -> Vec<&[FieldElement]> {
        self.events
            .iter()
            .filter_map(|e| match e {
                WireEvent::WireRound { sent, .. } => Some(sent[wire].as_slice()),
                WireEvent::Pd(_) => None,
            })
            .collect()
    }

    /// Total field elements pushed over the wires.
    pub fn wire_element_count(&self) -> u64 {
        let per_round = (self.ctx.n * self.ctx.u) as u64;
        self.events
            .iter()
            .filter(|e| matches!(e, WireEvent::WireRound { .. }))
            .count() as u64
            * per_round
    }

    /// Total bits pushed over the wires, `Σ_i log₂|W_i|`.
    pub fn wire_bits(&self) -> f64 {
        self.wire_element_count() as f64 * (self.ctx.q.get() as f64).log2()
    }

    /// Serialized form: one record per wire per round plus discussion
    /// records, same element packing as channel transcripts.
    pub fn encode(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC_WIRES);
        write_context(&mut out, &self.ctx);
        write_index_set(&mut out, &self.corrupted);
        let record_count: usize = self
            .events
            .iter()
            .map(|e| match e {
                WireEvent::WireRound { .. } => self.ctx.n,
                WireEvent::Pd(_) => 1,
            })
            .sum();
        out.extend_from_slice(&(record_count as u32).to_be_bytes());
        let mut round = 0u32;
        for event in &self.events {
            match event {
                WireEvent::WireRound { sent, received } => {
                    for wire in 0..self.ctx.n {
                        let mut payload = Vec::new();
                        payload.extend_from_slice(&round.to_be_bytes());
                        payload.extend_from_slice(&(wire as u32).to_be_bytes());
                        let single = |symbol: &Vec<FieldElement>| {
                            pack_codeword(
                                &Codeword::new(vec![symbol.clone()]).expect("symbol is nonempty"),
                            )
                        };
                        payload.extend(single(&sent[wire]));
                        payload.extend(single(&received[wire]));
                        out.push(0u8);
                        out.extend_from_slice(&(payload.len() as u32).to_be_bytes());
                        out.extend(payload);
                    }
                    round += 1;
                }
                WireEvent::Pd(m) => {
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

    pub fn decode(bytes: &[u8]) -> Result<WireTranscript, SmtError> {
        let mut r = Reader::new(bytes);
        r.expect_magic(MAGIC_WIRES)?;
        let ctx = read_context(&mut r)?;
        let corrupted = read_index_set(&mut r)?;
        let count = r.u32("record count")? as usize;
        let mut events: Vec<WireEvent> = Vec::new();
        let mut open_round: Option<(u32, Vec<Vec<FieldElement>>, Vec<Vec<FieldElement>>)> = None;
        let mut pd_index = 0usize;
        for _ in 0..count {
            let tag = r.u8("record tag")?;
            let len = r.u32("payload length")? as usize;
            let payload = r.bytes(len, "record payload")?;
            let mut pr = Reader::new(payload);
            match tag {
                0 => {
                    let round = pr.u32("round index")?;
                    let wire = pr.u32("wire index")? as usize;
                    let sent = unpack_codeword(&mut pr, 1, ctx.u, ctx.q)?;
                    let received = unpack_codeword(&mut pr, 1, ctx.u, ctx.q)?;
                    if matches!(&open_round, Some((r0, ..)) if *r0 != round) {
                        flush_round(&mut events, &mut open_round, ctx.n)?;
                    }
                    let (_, s, rec) =
                        open_round.get_or_insert_with(|| (round, Vec::new(), Vec::new()));
                    if wire != s.len() {
                        return Err(CodecError::Invalid(format!(
                            "wire records out of order: got wire {wire}, expected {}",
                            s.len()
                        ))
                        .into());
                    }
                    s.push(sent.symbol(0).to_vec());
                    rec.push(received.symbol(0).to_vec());
                    if s.len() == ctx.n {
                        flush_round(&mut events, &mut open_round, ctx.n)?;
                    }
                }
                1 => {
                    flush_round(&mut events, &mut open_round, ctx.n)?;
                    let direction = match pr.u8("direction")? {
                        0 => Direction::AliceToBob,
                        1 => Direction::BobToAlice,
                        d => return Err(CodecError::Invalid(format!("direction {d}")).into()),
                    };
                    let bit_len = pr.u32("bit length")? as usize;
                    let packed = pr.bytes((bit_len + 7) / 8, "pd bits")?;
                    events.push(WireEvent::Pd(PdMessage {
                        direction,
                        index: pd_index,
                        bits: crate::bits::BitString::from_bytes(packed, bit_len),
                    }));
                    pd_index += 1;
                }
                t => return Err(CodecError::Invalid(format!("record tag {t}")).into()),
            }
        }
        flush_round(&mut events, &mut open_round, ctx.n)?;
        Ok(WireTranscript {
            ctx,
            corrupted,
            events,
        })
    }
}

fn flush_round(
    events: &mut Vec<WireEvent>,
    open: &mut Option<(u32, Vec<Vec<FieldElement>>, Vec<Vec<FieldElement>>)>,
    n: usize,
) -> Result<(), SmtError> {
    if let Some((_, sent, received)) = open.take() {
        if sent.len() != n {
            return Err(SmtError::AsymmetricWires);
        }
        events.push(WireEvent::WireRound { sent, received });
    }
    Ok(())
}

/// Reinterprets a restricted execution as a wire execution: wire `i`
/// carries component `i`, discussion records are copied verbatim, and the
/// corrupted-wire set is the (shared) read/write set.
pub fn awtp_to_smt(transcript: &Transcript) -> Result<WireTranscript, SmtError> {
    if !transcript.sets().is_restricted() {
        return Err(SmtError::NotRestricted);
    }
    let events = transcript
        .events()
        .iter()
        .map(|event| match event {
            Event::Awtp { sent, received, .. } => WireEvent::WireRound {
                sent: sent.symbols().to_vec(),
                received: received.symbols().to_vec(),
            },
            Event::Pd(m) => WireEvent::Pd(m.clone()),
        })
        .collect();
    Ok(WireTranscript {
        ctx: *transcript.context(),
        corrupted: transcript.sets().read().clone(),
        events,
    })
}

/// Inverse of [`awtp_to_smt`].
pub fn smt_to_awtp(wt: &WireTranscript) -> Result<Transcript, SmtError> {
    let sets = ReadWriteSets::restricted(wt.ctx.n, wt.corrupted.clone())?;
    let mut transcript = Transcript::new(wt.ctx, sets);
    for event in &wt.events {
        match event {
            WireEvent::WireRound { sent, received } => {
                if sent.len() != wt.ctx.n || received.len() != wt.ctx.n {
                    return Err(SmtError::AsymmetricWires);
                }
                let sent = Codeword::new(sent.clone()).map_err(SmtError::Channel)?;
                let received = Codeword::new(received.clone()).map_err(SmtError::Channel)?;
                let error = received.sub(&sent);
                transcript.push_event(Event::Awtp {
                    sent,
                    received,
                    error,
                });
            }
            WireEvent::Pd(m) => transcript.push_event(Event::Pd(m.clone())),
        }
    }
    Ok(transcript)
}

/// Transmission rate: wire bits per message bit.
pub fn transmission_rate(wt: &WireTranscript, message_bits: f64) -> Result<f64, SmtError> {
    if message_bits <= 0.0 {
        return Err(SmtError::ZeroMessage);
    }
    Ok(wt.wire_bits() / message_bits)
}

/// Exact transmission rate in field elements, for transcripts whose message
/// is also counted in elements of the same field: `u·N·rounds / ℓ`.
pub fn transmission_rate_elements(
    wt: &WireTranscript,
    message_elements: u64,
) -> Result<Ratio<u64>, SmtError> {
    if message_elements == 0 {
        return Err(SmtError::ZeroMessage);
    }
    Ok(Ratio::new(wt.wire_element_count(), message_elements))
}
