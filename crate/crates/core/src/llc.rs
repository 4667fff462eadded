//! Linked-loop code: construction, encoding, and the parity predicates the
//! stitching decoder relies on.
//!
//! Every section carries `m` information bits and `J - m` parity bits. The
//! parity of section `l` is
//!
//! ```text
//! p(l) = sum_{r=1..M} w((l - r) mod L) · G_r
//! ```
//!
//! so each section is linked to its `M` predecessors and the first sections
//! wrap around to the last ones.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::ChannelOutput;
use crate::code::{check_section_bits, Code, Codeword, DecodeResult, Payload, SectionSymbol};
use crate::decoder;
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitRow};

/// Information widths up to this size get a precomputed `w·G_r` table.
const TABLE_MAX_INFO_BITS: usize = 16;

/// An immutable linked-loop code definition.
#[derive(Clone, Debug)]
pub struct LlcSpec {
    sections: usize,
    section_bits: usize,
    info_bits: usize,
    memory: usize,
    seed: u64,
    generators: Vec<BitMatrix>,
    inverses: Vec<BitMatrix>,
    // tables[r - 1][info] == info · G_r
    tables: Option<Vec<Vec<u64>>>,
    // solutions[r - 1][target] == w with w · G_r == target, or NO_SOLUTION
    solutions: Option<Vec<Vec<u64>>>,
}

const NO_SOLUTION: u64 = u64::MAX;

impl LlcSpec {
    /// Samples `memory` full-rank `m × (J - m)` parity matrices from `seed`.
    pub fn new(
        sections: usize,
        section_bits: usize,
        info_bits: usize,
        memory: usize,
        seed: u64,
    ) -> Result<Self> {
        check_section_bits(section_bits)?;
        if info_bits == 0 || info_bits >= section_bits {
            return Err(Error::invalid(format!(
                "information bits per section must be in 1..{section_bits}, got {info_bits}"
            )));
        }
        let parity_bits = section_bits - info_bits;
        if info_bits > parity_bits {
            return Err(Error::UnsupportedRate {
                info: info_bits,
                parity: parity_bits,
            });
        }
        if memory == 0 || memory >= sections {
            return Err(Error::invalid(format!(
                "memory depth must be in 1..{sections}, got {memory}"
            )));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let generators = (0..memory)
            .map(|_| BitMatrix::random_full_rank(info_bits, parity_bits, &mut rng))
            .collect::<Result<Vec<_>>>()?;
        Self::from_generators(sections, section_bits, generators, seed)
    }

    /// Builds a code from explicit parity matrices `G_1..G_M`.
    pub fn from_generators(
        sections: usize,
        section_bits: usize,
        generators: Vec<BitMatrix>,
        seed: u64,
    ) -> Result<Self> {
        check_section_bits(section_bits)?;
        let memory = generators.len();
        if memory == 0 || memory >= sections {
            return Err(Error::invalid(format!(
                "memory depth must be in 1..{sections}, got {memory}"
            )));
        }
        let info_bits = generators[0].rows();
        if info_bits == 0 || info_bits >= section_bits {
            return Err(Error::invalid("generator rows must be in 1..J"));
        }
        let parity_bits = section_bits - info_bits;
        if info_bits > parity_bits {
            return Err(Error::UnsupportedRate {
                info: info_bits,
                parity: parity_bits,
            });
        }
        if generators
            .iter()
            .any(|g| g.rows() != info_bits || g.cols() != parity_bits)
        {
            return Err(Error::dims(format!(
                "every parity matrix must be {info_bits}x{parity_bits}"
            )));
        }
        let inverses = generators
            .iter()
            .map(BitMatrix::right_inverse)
            .collect::<Result<Vec<_>>>()?;
        let tables = (info_bits <= TABLE_MAX_INFO_BITS).then(|| {
            generators
                .iter()
                .map(|g| (0..1u64 << info_bits).map(|x| g.left_mul_word(x)).collect())
                .collect()
        });
        let solutions = (parity_bits <= TABLE_MAX_INFO_BITS).then(|| {
            generators
                .iter()
                .zip(&inverses)
                .map(|(g, h)| {
                    (0..1u64 << parity_bits)
                        .map(|t| g.solve_row_word(t, h).unwrap_or(NO_SOLUTION))
                        .collect()
                })
                .collect()
        });
        Ok(LlcSpec {
            sections,
            section_bits,
            info_bits,
            memory,
            seed,
            generators,
            inverses,
            tables,
            solutions,
        })
    }

    pub fn sections(&self) -> usize {
        self.sections
    }

    pub fn section_bits(&self) -> usize {
        self.section_bits
    }

    pub fn info_bits(&self) -> usize {
        self.info_bits
    }

    pub fn parity_bits(&self) -> usize {
        self.section_bits - self.info_bits
    }

    pub fn memory(&self) -> usize {
        self.memory
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Payload length `B = L·m`.
    pub fn payload_bits(&self) -> usize {
        self.sections * self.info_bits
    }

    /// Information bits per channel use, `B / L`.
    pub fn rate(&self) -> f64 {
        self.payload_bits() as f64 / self.sections as f64
    }

    /// `G_r` for `r` in `1..=M`.
    pub fn generator(&self, r: usize) -> &BitMatrix {
        &self.generators[r - 1]
    }

    /// The cached right inverse of `G_r`.
    pub fn generator_inverse(&self, r: usize) -> &BitMatrix {
        &self.inverses[r - 1]
    }

    /// `info · G_r` on packed words.
    #[inline]
    pub(crate) fn contribution(&self, r: usize, info: u64) -> u64 {
        match &self.tables {
            Some(t) => t[r - 1][info as usize],
            None => self.generators[r - 1].left_mul_word(info),
        }
    }

    fn check_payload(&self, w: &Payload) -> Result<()> {
        if w.width() != self.payload_bits() {
            return Err(Error::invalid(format!(
                "payload has {} bits, code carries {}",
                w.width(),
                self.payload_bits()
            )));
        }
        Ok(())
    }

    /// Splits a payload into `L` consecutive chunks of `m` bits.
    pub fn partition_payload(&self, w: &Payload) -> Result<Vec<BitRow>> {
        self.check_payload(w)?;
        Ok((0..self.sections)
            .map(|l| w.bits().slice(l * self.info_bits, self.info_bits))
            .collect())
    }

    /// Parity bits of section `l` from the per-section information bits.
    pub fn parity(&self, info_sections: &[BitRow], l: usize) -> Result<BitRow> {
        if info_sections.len() != self.sections {
            return Err(Error::invalid(format!(
                "expected {} information sections, got {}",
                self.sections,
                info_sections.len()
            )));
        }
        if l >= self.sections {
            return Err(Error::invalid(format!(
                "section {l} out of range for {} sections",
                self.sections
            )));
        }
        let mut p = BitRow::zeros(self.parity_bits());
        for r in 1..=self.memory {
            let src = &info_sections[(l + self.sections - r) % self.sections];
            p.xor_assign(&self.generator(r).left_mul(src)?);
        }
        Ok(p)
    }

    pub fn encode(&self, w: &Payload) -> Result<Codeword> {
        let info: Vec<u64> = self
            .partition_payload(w)?
            .iter()
            .map(BitRow::to_word)
            .collect();
        let l_total = self.sections;
        let sections = (0..l_total)
            .map(|l| {
                let parity = (1..=self.memory).fold(0, |acc, r| {
                    acc ^ self.contribution(r, info[(l + l_total - r) % l_total])
                });
                SectionSymbol::from_parts(info[l], parity, self.info_bits)
            })
            .collect();
        Ok(Codeword::new(sections))
    }

    /// Sum of the known terms of the equation for section `eq`.
    pub(crate) fn window_sum(
        &self,
        slots: &[Slot],
        eq: usize,
        recovered: Option<u64>,
    ) -> WindowSum {
        let l_total = self.sections;
        let mut window = Vec::with_capacity(self.memory);
        for r in 1..=self.memory {
            match slots.get((eq + l_total - r) % l_total) {
                Some(&s) => window.push(s),
                None => return WindowSum::Undetermined,
            }
        }
        self.window_sum_recent(&window, recovered)
    }

    /// Like [`LlcSpec::window_sum`] with `recent[r - 1]` the slot `r`
    /// sections before the equation's own section.
    #[inline]
    pub(crate) fn window_sum_recent(&self, recent: &[Slot], recovered: Option<u64>) -> WindowSum {
        let mut sum = 0;
        let mut missing = None;
        for (i, slot) in recent.iter().enumerate() {
            let r = i + 1;
            match slot {
                Slot::Symbol(s) => sum ^= self.contribution(r, s.info(self.info_bits)),
                Slot::Erased => match recovered {
                    Some(w) => sum ^= self.contribution(r, w),
                    None => missing = Some(r),
                },
            }
        }
        match missing {
            Some(r) => WindowSum::Missing { r, partial: sum },
            None => WindowSum::Known(sum),
        }
    }

    /// Evaluates the parity equation of section `eq` on a (partial) path.
    pub(crate) fn evaluate(&self, slots: &[Slot], eq: usize, recovered: Option<u64>) -> Equation {
        let own = match slots.get(eq) {
            None => return Equation::Undetermined,
            Some(Slot::Erased) => return Equation::Skipped,
            Some(Slot::Symbol(s)) => s.parity(self.info_bits),
        };
        match self.window_sum(slots, eq, recovered) {
            WindowSum::Undetermined => Equation::Undetermined,
            WindowSum::Known(sum) => {
                if sum == own {
                    Equation::Holds
                } else {
                    Equation::Violated
                }
            }
            WindowSum::Missing { r, partial } => match self.solve(r, own ^ partial) {
                Some(w) => Equation::Solved(w),
                None => Equation::Unsolvable,
            },
        }
    }

    /// Solves `w · G_r = target` for `w`.
    #[inline]
    pub(crate) fn solve(&self, r: usize, target: u64) -> Option<u64> {
        match &self.solutions {
            Some(t) => Some(t[r - 1][target as usize]).filter(|&w| w != NO_SOLUTION),
            None => self.generators[r - 1].solve_row_word(target, &self.inverses[r - 1]),
        }
    }

    /// Order in which a stitched path determines its equations: sections
    /// `M..L` as they are appended, then the wrap-around sections `0..M`.
    pub(crate) fn equation_order(&self) -> impl Iterator<Item = usize> {
        (self.memory..self.sections).chain(0..self.memory)
    }

    /// True unless some equation whose sections are all explicit in `path`
    /// is violated. Equations touching an erased slot are not checked.
    pub fn check_parity(&self, path: &Path) -> bool {
        (0..path.len().min(self.sections))
            .all(|eq| self.evaluate(&path.slots, eq, None) != Equation::Violated)
    }

    /// Like [`LlcSpec::check_parity`], but an erased slot is resolved from the
    /// first equation that determines it and every further equation touching
    /// it must agree with that solution.
    pub fn check_parity_with_recovery(&self, path: &Path) -> Result<Verdict> {
        let erased = path.slots.iter().filter(|s| s.is_erased()).count();
        if erased > 1 {
            return Err(Error::invalid(format!(
                "path has {erased} erased slots, at most one is supported"
            )));
        }
        let mut recovered = if erased == 1 { path.recovered } else { None };
        let mut consistent = true;
        for eq in self.equation_order() {
            match self.evaluate(&path.slots, eq, recovered) {
                Equation::Solved(w) => recovered = Some(w),
                Equation::Violated | Equation::Unsolvable => {
                    consistent = false;
                    break;
                }
                Equation::Holds | Equation::Skipped | Equation::Undetermined => {}
            }
        }
        Ok(Verdict {
            consistent,
            recovered: recovered.map(|w| BitRow::from_word(w, self.info_bits)),
        })
    }

    /// Concatenates the information bits of a complete path.
    pub fn extract_info_bits(&self, path: &Path) -> Result<Payload> {
        if path.len() != self.sections {
            return Err(Error::invalid(format!(
                "path covers {} of {} sections",
                path.len(),
                self.sections
            )));
        }
        let m = self.info_bits;
        let mut bits = BitRow::zeros(self.payload_bits());
        for (l, slot) in path.slots.iter().enumerate() {
            let info = match slot {
                Slot::Symbol(s) => s.info(m),
                Slot::Erased => path
                    .recovered
                    .ok_or(Error::UnresolvedErasure { section: l })?,
            };
            let mut x = info;
            while x != 0 {
                let i = x.trailing_zeros() as usize;
                bits.set(l * m + i, true);
                x &= x - 1;
            }
        }
        Ok(Payload::new(bits))
    }
}

impl Code for LlcSpec {
    fn name(&self) -> &'static str {
        "llc"
    }

    fn sections(&self) -> usize {
        self.sections
    }

    fn section_bits(&self) -> usize {
        self.section_bits
    }

    fn payload_bits(&self) -> usize {
        LlcSpec::payload_bits(self)
    }

    fn encode(&self, payload: &Payload) -> Result<Codeword> {
        LlcSpec::encode(self, payload)
    }

    fn decode(&self, output: &ChannelOutput, path_cap: usize) -> Result<DecodeResult> {
        decoder::Decoder::new(self).with_path_cap(path_cap).decode(output)
    }

    fn memory(&self) -> Option<usize> {
        Some(self.memory)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum WindowSum {
    Undetermined,
    Known(u64),
    Missing { r: usize, partial: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) enum Equation {
    /// Some section of the equation is not in the path yet.
    Undetermined,
    /// The section's own symbol is erased.
    Skipped,
    Holds,
    Violated,
    /// The erased slot's information bits were determined.
    Solved(u64),
    Unsolvable,
}

/// One section of a stitched path.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    Symbol(SectionSymbol),
    /// Presumed erased.
    Erased,
}

impl Slot {
    pub fn is_erased(self) -> bool {
        matches!(self, Slot::Erased)
    }
}

/// A candidate stitched across sections `0..len`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Path {
    slots: Vec<Slot>,
    recovered: Option<u64>,
}

impl Path {
    pub fn root(symbol: SectionSymbol) -> Self {
        Path {
            slots: vec![Slot::Symbol(symbol)],
            recovered: None,
        }
    }

    pub fn from_slots(slots: Vec<Slot>) -> Self {
        Path {
            slots,
            recovered: None,
        }
    }

    pub fn from_codeword(codeword: &Codeword) -> Self {
        Path::from_slots(codeword.sections().iter().map(|&s| Slot::Symbol(s)).collect())
    }

    /// The codeword with section `erased` replaced by an erasure marker.
    pub fn with_erasure(codeword: &Codeword, erased: usize) -> Self {
        let mut p = Path::from_codeword(codeword);
        p.slots[erased] = Slot::Erased;
        p
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn erased_section(&self) -> Option<usize> {
        self.slots.iter().position(|s| s.is_erased())
    }

    /// Packed information bits attached to the erased slot.
    pub fn recovered(&self) -> Option<u64> {
        self.recovered
    }

    pub fn set_recovered(&mut self, info: Option<u64>) {
        self.recovered = info;
    }

    pub fn push(&mut self, slot: Slot) {
        self.slots.push(slot);
    }
}

/// Result of [`LlcSpec::check_parity_with_recovery`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub consistent: bool,
    pub recovered: Option<BitRow>,
}
