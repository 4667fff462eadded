//! Tree-code baseline.
//!
//! Section `l` carries `m(l)` information bits and `J - m(l)` parity bits,
//! with `p(l) = sum_{l' < l} w(l')·G_{l'l}`. Parity lengths never shrink from
//! one section to the next, so later sections prune harder. Decoding is plain
//! causal stitching: no wrap-around and no erasure tolerance.

use std::collections::HashMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::channel::ChannelOutput;
use crate::code::{check_section_bits, Code, Codeword, DecodeResult, Payload, SectionSymbol};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitRow};

/// Information bits per section used for `B = 128`, `L = 16`, `J = 16`.
///
/// The last three sections are parity only. A section whose information is
/// not covered by later parities can be swapped between two users whose
/// prefixes collide on its parity, which at K = 100 and 14 parity bits
/// happens about once per two decodes.
pub const DEFAULT_PROFILE: [usize; 16] = [16, 12, 12, 12, 10, 10, 8, 8, 8, 8, 8, 8, 8, 0, 0, 0];

#[derive(Clone, Debug)]
pub struct TreeSpec {
    section_bits: usize,
    profile: Vec<usize>,
    offsets: Vec<usize>,
    seed: u64,
    // links[l][l'] == G_{l'l} for l' < l; None when either side is empty.
    links: Vec<Vec<Option<BitMatrix>>>,
}

impl TreeSpec {
    pub fn new(section_bits: usize, profile: Vec<usize>, seed: u64) -> Result<Self> {
        check_section_bits(section_bits)?;
        if profile.is_empty() {
            return Err(Error::invalid("profile must cover at least one section"));
        }
        if let Some(&m) = profile.iter().find(|&&m| m > section_bits) {
            return Err(Error::invalid(format!(
                "{m} information bits do not fit a {section_bits}-bit section"
            )));
        }
        if profile.windows(2).any(|w| w[1] > w[0]) {
            return Err(Error::invalid(
                "parity lengths must be non-decreasing across sections",
            ));
        }
        let mut offsets = Vec::with_capacity(profile.len());
        let mut acc = 0;
        for &m in &profile {
            offsets.push(acc);
            acc += m;
        }
        if acc == 0 {
            return Err(Error::invalid("profile carries no information bits"));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let links = (0..profile.len())
            .map(|l| {
                let parity = section_bits - profile[l];
                (0..l)
                    .map(|src| {
                        (profile[src] > 0 && parity > 0)
                            .then(|| BitMatrix::random(profile[src], parity, &mut rng))
                    })
                    .collect()
            })
            .collect();
        Ok(TreeSpec {
            section_bits,
            profile,
            offsets,
            seed,
            links,
        })
    }

    /// Checks that `profile` sums to `payload_bits` before building.
    pub fn with_payload(
        payload_bits: usize,
        section_bits: usize,
        profile: Vec<usize>,
        seed: u64,
    ) -> Result<Self> {
        let sum: usize = profile.iter().sum();
        if sum != payload_bits {
            return Err(Error::invalid(format!(
                "profile sums to {sum}, payload has {payload_bits} bits"
            )));
        }
        Self::new(section_bits, profile, seed)
    }

    pub fn sections(&self) -> usize {
        self.profile.len()
    }

    pub fn section_bits(&self) -> usize {
        self.section_bits
    }

    pub fn profile(&self) -> &[usize] {
        &self.profile
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn payload_bits(&self) -> usize {
        self.offsets.last().unwrap() + self.profile.last().unwrap()
    }

    /// `G_{src,l}`, if both sides are non-empty.
    pub fn link(&self, src: usize, l: usize) -> Option<&BitMatrix> {
        self.links[l][src].as_ref()
    }

    fn expected_parity(&self, infos: &[u64], l: usize) -> u64 {
        infos
            .iter()
            .zip(&self.links[l])
            .fold(0, |acc, (&info, g)| match g {
                Some(g) => acc ^ g.left_mul_word(info),
                None => acc,
            })
    }

    pub fn encode(&self, w: &Payload) -> Result<Codeword> {
        if w.width() != self.payload_bits() {
            return Err(Error::invalid(format!(
                "payload has {} bits, code carries {}",
                w.width(),
                self.payload_bits()
            )));
        }
        let infos: Vec<u64> = self
            .profile
            .iter()
            .zip(&self.offsets)
            .map(|(&m, &off)| w.bits().slice(off, m).to_word())
            .collect();
        let sections = (0..self.sections())
            .map(|l| {
                let parity = self.expected_parity(&infos[..l], l);
                SectionSymbol::from_parts(infos[l], parity, self.profile[l])
            })
            .collect();
        Ok(Codeword::new(sections))
    }

    /// Causal stitching from every section-0 entry.
    pub fn decode_with_cap(&self, output: &ChannelOutput, path_cap: usize) -> Result<DecodeResult> {
        output.check_geometry(self.sections(), self.section_bits)?;
        let buckets: Vec<HashMap<u64, Vec<SectionSymbol>>> = output
            .lists()
            .iter()
            .enumerate()
            .map(|(l, list)| {
                let mut b: HashMap<u64, Vec<SectionSymbol>> = HashMap::new();
                for &s in list {
                    b.entry(s.parity(self.profile[l])).or_default().push(s);
                }
                b
            })
            .collect();

        let mut result = DecodeResult::default();
        for &root in output.list(0) {
            // Each path is the information bits stitched so far.
            let mut live: Vec<Vec<u64>> = vec![vec![root.info(self.profile[0])]];
            for (l, bucket) in buckets.iter().enumerate().skip(1) {
                let mut next = Vec::new();
                for infos in &live {
                    let expected = self.expected_parity(infos, l);
                    for s in bucket.get(&expected).map_or(&[][..], Vec::as_slice) {
                        let mut p = Vec::with_capacity(self.sections());
                        p.extend_from_slice(infos);
                        p.push(s.info(self.profile[l]));
                        next.push(p);
                    }
                }
                if next.len() > path_cap {
                    return Err(Error::PathExplosion {
                        root: root.0,
                        section: l,
                        live: next.len(),
                        cap: path_cap,
                    });
                }
                live = next;
                if live.is_empty() {
                    break;
                }
            }
            if !live.is_empty() {
                result.surviving_roots.insert(root);
            }
            for infos in live {
                result.decoded.insert(self.assemble(&infos));
            }
        }
        result.phase1_count = result.decoded.len();
        Ok(result)
    }

    pub fn decode(&self, output: &ChannelOutput) -> Result<DecodeResult> {
        self.decode_with_cap(output, crate::decoder::DEFAULT_PATH_CAP)
    }

    fn assemble(&self, infos: &[u64]) -> Payload {
        let mut bits = BitRow::zeros(self.payload_bits());
        for (l, &info) in infos.iter().enumerate() {
            for i in 0..self.profile[l] {
                if (info >> i) & 1 == 1 {
                    bits.set(self.offsets[l] + i, true);
                }
            }
        }
        Payload::new(bits)
    }
}

impl Code for TreeSpec {
    fn name(&self) -> &'static str {
        "tc"
    }

    fn sections(&self) -> usize {
        TreeSpec::sections(self)
    }

    fn section_bits(&self) -> usize {
        self.section_bits
    }

    fn payload_bits(&self) -> usize {
        TreeSpec::payload_bits(self)
    }

    fn encode(&self, payload: &Payload) -> Result<Codeword> {
        TreeSpec::encode(self, payload)
    }

    fn decode(&self, output: &ChannelOutput, path_cap: usize) -> Result<DecodeResult> {
        self.decode_with_cap(output, path_cap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn default_spec() -> TreeSpec {
        TreeSpec::with_payload(128, 16, DEFAULT_PROFILE.to_vec(), 3).unwrap()
    }

    #[test]
    fn default_profile_is_admissible() {
        assert_eq!(DEFAULT_PROFILE.iter().sum::<usize>(), 128);
        let spec = default_spec();
        assert_eq!(spec.payload_bits(), 128);
        assert!(spec.link(0, 1).is_some());
    }

    #[test]
    fn profile_validation() {
        assert!(TreeSpec::with_payload(2, 2, vec![2, 0], 0).is_ok());
        let mut short = DEFAULT_PROFILE.to_vec();
        short[15] = 1;
        assert!(TreeSpec::with_payload(128, 16, short, 0).is_err());
        assert!(TreeSpec::with_payload(16, 16, vec![4, 12], 0).is_err());
        assert!(TreeSpec::new(8, vec![9], 0).is_err());
    }

    #[test]
    fn zero_payload_zero_codeword() {
        let spec = default_spec();
        let cw = spec.encode(&Payload::zeros(128)).unwrap();
        assert!(cw.sections().iter().all(|s| s.0 == 0));
    }

    #[test]
    fn first_section_is_all_information() {
        let spec = default_spec();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let w = Payload::new(BitRow::random(128, &mut rng));
        let cw = spec.encode(&w).unwrap();
        assert_eq!(cw.sections()[0].to_row(16), w.bits().slice(0, 16));
    }

    #[test]
    fn encoding_is_linear() {
        let spec = default_spec();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..100 {
            let a = Payload::new(BitRow::random(128, &mut rng));
            let b = Payload::new(BitRow::random(128, &mut rng));
            let lhs = spec.encode(&a.xor(&b)).unwrap();
            let rhs = spec.encode(&a).unwrap().xor(&spec.encode(&b).unwrap());
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn single_user_round_trip_and_erasure_drop() {
        let spec = default_spec();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let w = Payload::new(BitRow::random(128, &mut rng));
        let cw = spec.encode(&w).unwrap();
        let full: Vec<Vec<SectionSymbol>> = cw.sections().iter().map(|&s| vec![s]).collect();
        let y = ChannelOutput::new(16, full.clone());
        assert_eq!(spec.decode(&y).unwrap().decoded, BTreeSet::from([w]));
        for e in 0..16 {
            let mut lists = full.clone();
            lists[e].clear();
            let y = ChannelOutput::new(16, lists);
            assert!(spec.decode(&y).unwrap().decoded.is_empty(), "section {e}");
        }
    }

    #[test]
    fn degenerate_profile_round_trip() {
        let spec = TreeSpec::with_payload(2, 2, vec![2, 0], 5).unwrap();
        for v in 0..4u64 {
            let w = Payload::new(BitRow::from_word(v, 2));
            let cw = spec.encode(&w).unwrap();
            let y = ChannelOutput::new(2, cw.sections().iter().map(|&s| vec![s]).collect());
            assert_eq!(spec.decode(&y).unwrap().decoded, BTreeSet::from([w]));
        }
    }
}
