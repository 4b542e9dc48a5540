//! Binary strings for discussion-channel payloads and transcript
//! serialization.
//!
//! Field elements are packed as fixed-width big-endian unsigned integers of
//! `⌈log₂ q⌉` bits each; this layout is normative for the wire formats, so it
//! lives in one place.

use std::fmt;

use crate::field::{FieldElement, PrimeModulus};

/// A growable bit string, most significant bit first within each pushed
/// integer.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
pub struct BitString {
    bits: Vec<bool>,
}

impl BitString {
    pub fn new() -> BitString {
        BitString::default()
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn push_bit(&mut self, bit: bool) {
        self.bits.push(bit);
    }

    pub fn bit(&self, index: usize) -> bool {
        self.bits[index]
    }

    /// Appends `value` as a big-endian unsigned integer of exactly `width`
    /// bits. Panics if the value does not fit.
    pub fn push_uint(&mut self, value: u64, width: usize) {
        assert!(width <= 64);
        assert!(
            width == 64 || value < (1u64 << width),
            "value {value} does not fit in {width} bits"
        );
        for i in (0..width).rev() {
            self.bits.push((value >> i) & 1 == 1);
        }
    }

    /// Reads a big-endian unsigned integer of `width` bits at `offset`.
    pub fn uint_at(&self, offset: usize, width: usize) -> u64 {
        assert!(offset + width <= self.bits.len(), "read past end");
        let mut v = 0u64;
        for i in 0..width {
            v = (v << 1) | self.bits[offset + i] as u64;
        }
        v
    }

    /// Appends one field element at the width of its modulus.
    pub fn push_element(&mut self, e: FieldElement) {
        self.push_uint(e.value(), e.modulus().bit_width());
    }

    /// Reads one field element of `q` at `offset`, advancing nothing.
    pub fn element_at(&self, offset: usize, q: PrimeModulus) -> FieldElement {
        q.element(self.uint_at(offset, q.bit_width()))
    }

    /// Packs into bytes, MSB first, zero-padded at the tail.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = vec![0u8; (self.bits.len() + 7) / 8];
        for (i, &b) in self.bits.iter().enumerate() {
            if b {
                out[i / 8] |= 1 << (7 - i % 8);
            }
        }
        out
    }

    /// Unpacks `bit_len` bits from MSB-first packed bytes.
    pub fn from_bytes(bytes: &[u8], bit_len: usize) -> BitString {
        assert!(bit_len <= bytes.len() * 8);
        let bits = (0..bit_len)
            .map(|i| bytes[i / 8] >> (7 - i % 8) & 1 == 1)
            .collect();
        BitString { bits }
    }
}

impl fmt::Display for BitString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for &b in &self.bits {
            write!(f, "{}", if b { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl std::str::FromStr for BitString {
    type Err = String;

    fn from_str(s: &str) -> Result<BitString, String> {
        let mut out = BitString::new();
        for c in s.chars() {
            match c {
                '0' => out.push_bit(false),
                '1' => out.push_bit(true),
                other => return Err(format!("invalid bit character {other:?}")),
            }
        }
        Ok(out)
    }
}
