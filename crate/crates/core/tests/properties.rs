use std::collections::BTreeSet;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use uace::{
    decode, decode_phase1, sample_payloads, transmit, BitMatrix, BitRow, ChannelOutput,
    ChannelParams, Codeword, LlcSpec, Path, Payload, SectionSymbol, Slot,
};

fn small_spec(seed: u64) -> LlcSpec {
    LlcSpec::new(4, 4, 2, 2, seed).unwrap()
}

fn received(spec: &LlcSpec, codewords: &[Codeword], erase: &[(usize, usize)]) -> ChannelOutput {
    let mut lists = vec![Vec::new(); spec.sections()];
    for (k, cw) in codewords.iter().enumerate() {
        for (l, &s) in cw.sections().iter().enumerate() {
            if !erase.contains(&(k, l)) {
                lists[l].push(s);
            }
        }
    }
    ChannelOutput::new(spec.section_bits(), lists)
}

/// Every way of picking one entry per section.
fn all_paths(y: &ChannelOutput) -> Vec<Vec<SectionSymbol>> {
    let mut paths = vec![Vec::new()];
    for list in y.lists() {
        paths = paths
            .into_iter()
            .flat_map(|p| {
                list.iter().map(move |&s| {
                    let mut q = p.clone();
                    q.push(s);
                    q
                })
            })
            .collect();
    }
    paths
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rank_is_invariant_under_row_operations(seed in any::<u64>(), rows in 1usize..12, cols in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = BitMatrix::random(rows, cols, &mut rng);
        let ops = BitMatrix::random_full_rank(rows, rows, &mut rng).unwrap();
        prop_assert_eq!(ops.mul(&a).unwrap().rank(), a.rank());
    }

    #[test]
    fn parity_is_linear_in_each_section(seed in any::<u64>(), l in 0usize..16) {
        let spec = LlcSpec::new(16, 16, 8, 2, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a: Vec<BitRow> = (0..16).map(|_| BitRow::random(8, &mut rng)).collect();
        let b: Vec<BitRow> = (0..16).map(|_| BitRow::random(8, &mut rng)).collect();
        let sum: Vec<BitRow> = a.iter().zip(&b).map(|(x, y)| x.xor(y)).collect();
        prop_assert_eq!(
            spec.parity(&sum, l).unwrap(),
            spec.parity(&a, l).unwrap().xor(&spec.parity(&b, l).unwrap())
        );
    }

    #[test]
    fn flipping_a_parity_bit_breaks_the_check(seed in any::<u64>(), l in 0usize..16, bit in 0usize..8) {
        let spec = LlcSpec::new(16, 16, 8, 2, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = Payload::new(BitRow::random(128, &mut rng));
        let mut sections = spec.encode(&w).unwrap().sections().to_vec();
        sections[l].0 ^= 1 << (8 + bit);
        prop_assert!(!spec.check_parity(&Path::from_codeword(&Codeword::new(sections))));
    }

    #[test]
    fn extract_inverts_encode(seed in any::<u64>()) {
        let spec = LlcSpec::new(16, 16, 8, 2, 1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = Payload::new(BitRow::random(128, &mut rng));
        let cw = spec.encode(&w).unwrap();
        prop_assert_eq!(spec.extract_info_bits(&Path::from_codeword(&cw)).unwrap(), w);
    }

    #[test]
    fn recovery_is_exact_for_every_later_section(seed in any::<u64>(), memory in 1usize..4) {
        let spec = LlcSpec::new(8, 12, 6, memory, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = Payload::new(BitRow::random(spec.payload_bits(), &mut rng));
        let cw = spec.encode(&w).unwrap();
        for e in 1..8 {
            let mut path = Path::with_erasure(&cw, e);
            let verdict = spec.check_parity_with_recovery(&path).unwrap();
            prop_assert!(verdict.consistent);
            let info = verdict.recovered.unwrap();
            prop_assert_eq!(&info, &w.bits().slice(6 * e, 6));
            path.set_recovered(Some(info.to_word()));
            prop_assert_eq!(spec.extract_info_bits(&path).unwrap(), w.clone());
        }
    }

    // Stitching with early pruning keeps exactly the paths a full check keeps.
    #[test]
    fn phase1_matches_exhaustive_check(seed in any::<u64>(), users in 1usize..4, pe in 0.0f64..0.4) {
        let spec = small_spec(seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sent = sample_payloads(users, spec.payload_bits(), &mut rng).unwrap();
        let cws: Vec<Codeword> = sent.iter().map(|w| spec.encode(w).unwrap()).collect();
        let (y, _) = transmit(&cws, 4, &ChannelParams::new(users, pe).unwrap(), &mut rng).unwrap();
        let exhaustive: BTreeSet<Payload> = all_paths(&y)
            .into_iter()
            .map(|p| Path::from_slots(p.into_iter().map(Slot::Symbol).collect()))
            .filter(|p| spec.check_parity(p))
            .map(|p| spec.extract_info_bits(&p).unwrap())
            .collect();
        prop_assert_eq!(decode_phase1(&spec, &y).unwrap().payloads, exhaustive);
    }

    #[test]
    fn every_intact_codeword_is_decoded(seed in any::<u64>(), users in 1usize..30, pe in 0.0f64..0.2) {
        let spec = LlcSpec::new(16, 16, 8, 2, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sent = sample_payloads(users, 128, &mut rng).unwrap();
        let cws: Vec<Codeword> = sent.iter().map(|w| spec.encode(w).unwrap()).collect();
        let (y, mask) = transmit(&cws, 16, &ChannelParams::new(users, pe).unwrap(), &mut rng).unwrap();
        let decoded = decode(&spec, &y).unwrap().decoded;
        for (k, w) in sent.iter().enumerate() {
            if mask.user(k).iter().all(|&e| !e) {
                prop_assert!(decoded.contains(w));
            }
        }
    }

    #[test]
    fn decoded_payloads_are_supported_by_the_output(seed in any::<u64>(), users in 1usize..30, pe in 0.0f64..0.2) {
        let spec = LlcSpec::new(16, 16, 8, 2, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sent = sample_payloads(users, 128, &mut rng).unwrap();
        let cws: Vec<Codeword> = sent.iter().map(|w| spec.encode(w).unwrap()).collect();
        let (y, _) = transmit(&cws, 16, &ChannelParams::new(users, pe).unwrap(), &mut rng).unwrap();
        for w in decode(&spec, &y).unwrap().decoded {
            let cw = spec.encode(&w).unwrap();
            prop_assert!(y.contains(0, cw.sections()[0]));
            let missing = (1..16).filter(|&l| !y.contains(l, cw.sections()[l])).count();
            prop_assert!(missing <= 1);
        }
    }

    #[test]
    fn lone_single_erasure_user_is_recovered(seed in any::<u64>(), users in 2usize..20, e in 1usize..16) {
        let spec = LlcSpec::new(16, 16, 8, 2, seed).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sent = sample_payloads(users, 128, &mut rng).unwrap();
        let cws: Vec<Codeword> = sent.iter().map(|w| spec.encode(w).unwrap()).collect();
        let y = received(&spec, &cws, &[(0, e)]);
        let result = decode(&spec, &y).unwrap();
        // Unless another user shares the root, the erased user comes back in phase 2.
        if cws[1..].iter().all(|c| c.sections()[0] != cws[0].sections()[0]) {
            prop_assert!(result.decoded.contains(&sent[0]));
        }
        prop_assert!(sent[1..].iter().all(|w| result.decoded.contains(w)));
    }

    #[test]
    fn channel_output_is_a_sorted_subset(seed in any::<u64>(), users in 1usize..40, pe in 0.0f64..=1.0) {
        let spec = LlcSpec::new(16, 16, 8, 2, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let sent = sample_payloads(users, 128, &mut rng).unwrap();
        let cws: Vec<Codeword> = sent.iter().map(|w| spec.encode(w).unwrap()).collect();
        let (y, mask) = transmit(&cws, 16, &ChannelParams::new(users, pe).unwrap(), &mut rng).unwrap();
        for l in 0..16 {
            let list = y.list(l);
            prop_assert!(list.windows(2).all(|w| w[0] < w[1]));
            let expected: BTreeSet<SectionSymbol> = cws
                .iter()
                .enumerate()
                .filter(|&(k, _)| !mask.is_erased(k, l))
                .map(|(_, c)| c.sections()[l])
                .collect();
            prop_assert_eq!(list.to_vec(), expected.into_iter().collect::<Vec<_>>());
        }
    }
}

#[test]
fn erasure_rate_matches_probability() {
    let spec = LlcSpec::new(16, 16, 8, 2, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let sent = sample_payloads(500, 128, &mut rng).unwrap();
    let cws: Vec<Codeword> = sent.iter().map(|w| spec.encode(w).unwrap()).collect();
    let (_, mask) = transmit(&cws, 16, &ChannelParams::new(500, 0.2).unwrap(), &mut rng).unwrap();
    let rate = mask.count() as f64 / 8000.0;
    // sigma is about 0.0045
    assert!((rate - 0.2).abs() < 0.02, "rate {rate}");
}

#[test]
fn payload_bits_are_unbiased() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let sent = sample_payloads(2000, 128, &mut rng).unwrap();
    let ones: usize = sent.iter().map(|w| w.bits().count_ones()).sum();
    let mean = ones as f64 / (2000.0 * 128.0);
    assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
}

#[test]
fn tiny_payloads_collide_at_the_birthday_rate() {
    // 4-bit payloads, 6 users: P(no repeat) = 16·15·14·13·12·11 / 16^6.
    let no_repeat: f64 = (0..6).map(|i| (16 - i) as f64 / 16.0).product();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let trials = 20_000;
    let clean = (0..trials)
        .filter(|_| {
            let w = sample_payloads(6, 4, &mut rng).unwrap();
            w.iter().collect::<BTreeSet<_>>().len() == 6
        })
        .count();
    let observed = clean as f64 / trials as f64;
    assert!((observed - no_repeat).abs() < 0.02, "{observed} vs {no_repeat}");
}
