//! The unsourced A-channel with erasures.
//!
//! Each user's symbol in each section is erased independently with
//! probability `p_e`; the receiver sees, per section, the set of surviving
//! symbols without multiplicities or user identities.

use rand::Rng;

use crate::code::{Codeword, Payload, SectionSymbol};
use crate::error::{Error, Result};
use crate::gf2::BitRow;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChannelParams {
    pub users: usize,
    pub erasure_prob: f64,
}

impl ChannelParams {
    pub fn new(users: usize, erasure_prob: f64) -> Result<Self> {
        if users == 0 {
            return Err(Error::invalid("at least one active user is required"));
        }
        if !(0.0..=1.0).contains(&erasure_prob) {
            return Err(Error::invalid(format!(
                "erasure probability {erasure_prob} outside [0, 1]"
            )));
        }
        Ok(ChannelParams {
            users,
            erasure_prob,
        })
    }
}

/// Per-section sets of received symbols, each sorted ascending and
/// duplicate-free.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelOutput {
    section_bits: usize,
    lists: Vec<Vec<SectionSymbol>>,
}

impl ChannelOutput {
    /// Builds an output from arbitrary lists, sorting and deduplicating them.
    pub fn new(section_bits: usize, lists: Vec<Vec<SectionSymbol>>) -> Self {
        let lists = lists
            .into_iter()
            .map(|mut l| {
                l.sort_unstable();
                l.dedup();
                l
            })
            .collect();
        ChannelOutput {
            section_bits,
            lists,
        }
    }

    pub fn empty(sections: usize, section_bits: usize) -> Self {
        ChannelOutput {
            section_bits,
            lists: vec![Vec::new(); sections],
        }
    }

    pub fn sections(&self) -> usize {
        self.lists.len()
    }

    pub fn section_bits(&self) -> usize {
        self.section_bits
    }

    pub fn list(&self, l: usize) -> &[SectionSymbol] {
        &self.lists[l]
    }

    pub fn lists(&self) -> &[Vec<SectionSymbol>] {
        &self.lists
    }

    pub fn contains(&self, l: usize, s: SectionSymbol) -> bool {
        self.lists[l].binary_search(&s).is_ok()
    }

    pub(crate) fn check_geometry(&self, sections: usize, section_bits: usize) -> Result<()> {
        if self.sections() != sections || self.section_bits != section_bits {
            return Err(Error::invalid(format!(
                "channel output is {}x{} bits, code expects {}x{}",
                self.sections(),
                self.section_bits,
                sections,
                section_bits
            )));
        }
        Ok(())
    }
}

/// `erased[k][l]` is true when user `k`'s section `l` was erased.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ErasureMask {
    erased: Vec<Vec<bool>>,
}

impl ErasureMask {
    pub fn is_erased(&self, user: usize, section: usize) -> bool {
        self.erased[user][section]
    }

    pub fn user(&self, user: usize) -> &[bool] {
        &self.erased[user]
    }

    pub fn users(&self) -> usize {
        self.erased.len()
    }

    pub fn count(&self) -> usize {
        self.erased.iter().flatten().filter(|&&e| e).count()
    }
}

/// Sends every codeword through the channel.
///
/// Erasures are drawn user by user, section by section. The mask is returned
/// for instrumentation only; decoders never see it.
pub fn transmit<R: Rng + ?Sized>(
    codewords: &[Codeword],
    section_bits: usize,
    params: &ChannelParams,
    rng: &mut R,
) -> Result<(ChannelOutput, ErasureMask)> {
    let sections = codewords.first().map_or(0, Codeword::len);
    if codewords.iter().any(|c| c.len() != sections) {
        return Err(Error::invalid("codewords have different section counts"));
    }
    if section_bits < 64
        && codewords
            .iter()
            .flat_map(|c| c.sections())
            .any(|s| s.0 >> section_bits != 0)
    {
        return Err(Error::invalid(format!(
            "a symbol is wider than {section_bits} bits"
        )));
    }
    let mut lists = vec![Vec::with_capacity(codewords.len()); sections];
    let mut erased = Vec::with_capacity(codewords.len());
    for cw in codewords {
        let row: Vec<bool> = (0..sections)
            .map(|_| rng.gen_bool(params.erasure_prob))
            .collect();
        for (l, (&gone, &s)) in row.iter().zip(cw.sections()).enumerate() {
            if !gone {
                lists[l].push(s);
            }
        }
        erased.push(row);
    }
    Ok((
        ChannelOutput::new(section_bits, lists),
        ErasureMask { erased },
    ))
}

/// Draws `users` independent uniform payloads, with replacement.
pub fn sample_payloads<R: Rng + ?Sized>(users: usize, bits: usize, rng: &mut R) -> Result<Vec<Payload>> {
    if bits == 0 {
        return Err(Error::invalid("payloads need at least one bit"));
    }
    Ok((0..users)
        .map(|_| Payload::new(BitRow::random(bits, rng)))
        .collect())
}
