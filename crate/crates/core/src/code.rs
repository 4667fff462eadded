//! Types shared by every code: payloads, section symbols, codewords, and the
//! [`Code`] trait the simulation harness drives.

use std::collections::BTreeSet;
use std::fmt;

use crate::channel::ChannelOutput;
use crate::error::{Error, Result};
use crate::gf2::{low_mask, BitRow};

/// Largest supported section width. Section symbols are packed into a `u64`.
pub const MAX_SECTION_BITS: usize = 64;

/// A user's message.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Payload(BitRow);

impl Payload {
    pub fn new(bits: BitRow) -> Self {
        Payload(bits)
    }

    pub fn zeros(width: usize) -> Self {
        Payload(BitRow::zeros(width))
    }

    pub fn bits(&self) -> &BitRow {
        &self.0
    }

    pub fn width(&self) -> usize {
        self.0.width()
    }

    /// Bitwise XOR of two payloads of equal width.
    pub fn xor(&self, other: &Payload) -> Payload {
        Payload(self.0.xor(&other.0))
    }

    /// Parses a hex string, most significant nibble first. Bit 0 of the
    /// payload is the high bit of the first nibble.
    pub fn from_hex(hex_str: &str, width: usize) -> Result<Payload> {
        let bytes = hex::decode(hex_str.trim())
            .map_err(|e| Error::invalid(format!("malformed payload hex: {e}")))?;
        if bytes.len() != width.div_ceil(8) {
            return Err(Error::invalid(format!(
                "payload hex has {} bytes, expected {} for {width} bits",
                bytes.len(),
                width.div_ceil(8)
            )));
        }
        let mut row = BitRow::zeros(width);
        for i in 0..bytes.len() * 8 {
            let bit = (bytes[i / 8] >> (7 - i % 8)) & 1 == 1;
            if i < width {
                row.set(i, bit);
            } else if bit {
                return Err(Error::invalid("payload hex sets bits past the payload width"));
            }
        }
        Ok(Payload(row))
    }

    pub fn to_hex(&self) -> String {
        let mut bytes = vec![0u8; self.width().div_ceil(8)];
        for i in self.0.iter_ones() {
            bytes[i / 8] |= 0x80 >> (i % 8);
        }
        hex::encode(bytes)
    }
}

impl fmt::Debug for Payload {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Payload({})", self.to_hex())
    }
}

/// One section's channel symbol, packed into a word.
///
/// Bit `i` of the symbol is bit `i` of the row vector `w(l).p(l)`: the low
/// `m` bits carry information, the rest carry parity. Ordering is by the
/// unsigned integer value.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SectionSymbol(pub u64);

impl SectionSymbol {
    pub fn from_parts(info: u64, parity: u64, info_bits: usize) -> Self {
        SectionSymbol(info | (parity << info_bits))
    }

    pub fn info(self, info_bits: usize) -> u64 {
        self.0 & low_mask(info_bits)
    }

    pub fn parity(self, info_bits: usize) -> u64 {
        if info_bits >= MAX_SECTION_BITS {
            0
        } else {
            self.0 >> info_bits
        }
    }

    pub fn to_row(self, width: usize) -> BitRow {
        BitRow::from_word(self.0, width)
    }
}

/// The `L` section symbols one user transmits.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Codeword {
    sections: Vec<SectionSymbol>,
}

impl Codeword {
    pub fn new(sections: Vec<SectionSymbol>) -> Self {
        Codeword { sections }
    }

    pub fn sections(&self) -> &[SectionSymbol] {
        &self.sections
    }

    pub fn len(&self) -> usize {
        self.sections.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sections.is_empty()
    }

    pub fn xor(&self, other: &Codeword) -> Codeword {
        Codeword {
            sections: self
                .sections
                .iter()
                .zip(&other.sections)
                .map(|(a, b)| SectionSymbol(a.0 ^ b.0))
                .collect(),
        }
    }
}

/// Output of a list decoder.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DecodeResult {
    pub decoded: BTreeSet<Payload>,
    /// Payloads found by erasure-free stitching.
    pub phase1_count: usize,
    /// Payloads found only by single-erasure recovery.
    pub phase2_count: usize,
    /// Section-0 symbols that rooted at least one complete erasure-free path.
    pub surviving_roots: BTreeSet<SectionSymbol>,
}

/// A code for the unsourced A-channel with erasures.
pub trait Code: Sync {
    fn name(&self) -> &'static str;
    fn sections(&self) -> usize;
    fn section_bits(&self) -> usize;
    fn payload_bits(&self) -> usize;
    fn encode(&self, payload: &Payload) -> Result<Codeword>;
    fn decode(&self, output: &ChannelOutput, path_cap: usize) -> Result<DecodeResult>;
    /// Memory depth, for codes that have one.
    fn memory(&self) -> Option<usize> {
        None
    }
}

pub(crate) fn check_section_bits(j: usize) -> Result<()> {
    if j == 0 || j > MAX_SECTION_BITS {
        return Err(Error::invalid(format!(
            "section width must be in 1..={MAX_SECTION_BITS}, got {j}"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hex_round_trip() {
        let p = Payload::new(BitRow::from_bits(&[1, 0, 1, 1, 0, 0, 1, 0, 1, 1, 1, 1]));
        let hex = p.to_hex();
        assert_eq!(hex, "b2f0");
        assert_eq!(Payload::from_hex(&hex, 12).unwrap(), p);
    }

    #[test]
    fn hex_rejects_garbage() {
        assert!(Payload::from_hex("zz", 8).is_err());
        assert!(Payload::from_hex("00", 16).is_err());
        assert!(Payload::from_hex("0f", 4).is_err());
    }

    #[test]
    fn symbol_parts() {
        let s = SectionSymbol::from_parts(0b1011, 0b0110, 4);
        assert_eq!(s.0, 0b0110_1011);
        assert_eq!(s.info(4), 0b1011);
        assert_eq!(s.parity(4), 0b0110);
    }
}
