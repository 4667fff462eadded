//! Exhaustive reference decoder for tiny codes.
//!
//! Enumerates every payload, encodes it, and applies the list-membership
//! rules the stitching decoder realizes. It shares only the encoder with the
//! stitching decoder.

use std::collections::BTreeSet;

use crate::channel::ChannelOutput;
use crate::code::{Payload, SectionSymbol};
use crate::error::{Error, Result};
use crate::gf2::BitRow;
use crate::llc::LlcSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleLimits {
    pub max_payload_bits: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        OracleLimits {
            max_payload_bits: 12,
        }
    }
}

/// Every payload whose codeword is fully present, plus every payload whose
/// section-0 symbol is not claimed by one of those and that misses at most
/// one later section.
pub fn oracle_decode(
    spec: &LlcSpec,
    output: &ChannelOutput,
    limits: OracleLimits,
) -> Result<BTreeSet<Payload>> {
    let bits = spec.payload_bits();
    if bits > limits.max_payload_bits || bits >= 64 {
        return Err(Error::EnumerationRefused {
            bits,
            limit: limits.max_payload_bits,
        });
    }
    output.check_geometry(spec.sections(), spec.section_bits())?;

    // (payload, root symbol, number of sections >= 1 missing from the output)
    let mut candidates: Vec<(Payload, SectionSymbol, usize)> = Vec::new();
    for v in 0..1u64 << bits {
        let w = Payload::new(BitRow::from_word(v, bits));
        let cw = spec.encode(&w)?;
        let root = cw.sections()[0];
        if !output.contains(0, root) {
            continue;
        }
        let missing = cw
            .sections()
            .iter()
            .enumerate()
            .skip(1)
            .filter(|&(l, &s)| !output.contains(l, s))
            .count();
        if missing <= 1 {
            candidates.push((w, root, missing));
        }
    }

    let roots_used: BTreeSet<SectionSymbol> = candidates
        .iter()
        .filter(|c| c.2 == 0)
        .map(|c| c.1)
        .collect();
    Ok(candidates
        .into_iter()
        .filter(|(_, root, missing)| *missing == 0 || !roots_used.contains(root))
        .map(|(w, _, _)| w)
        .collect())
}
