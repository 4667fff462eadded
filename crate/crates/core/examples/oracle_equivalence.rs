//! Compares the stitching decoder with exhaustive enumeration on a code small
//! enough to list every payload.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use uace::{decode, oracle_decode, sample_payloads, transmit, ChannelParams, LlcSpec, OracleLimits};

fn main() -> uace::Result<()> {
    let mut mismatches = 0;
    let mut instances = 0;
    for seed in 0..300u64 {
        // 4 sections of 4 bits, 2 information bits each: 256 payloads.
        let spec = LlcSpec::new(4, 4, 2, 2, seed)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let users = 1 + (seed % 3) as usize;
        let pe = [0.0, 0.1, 0.3][(seed / 3 % 3) as usize];
        let sent = sample_payloads(users, spec.payload_bits(), &mut rng)?;
        let codewords = sent.iter().map(|w| spec.encode(w)).collect::<uace::Result<Vec<_>>>()?;
        let (y, _) = transmit(&codewords, 4, &ChannelParams::new(users, pe)?, &mut rng)?;

        let stitched = decode(&spec, &y)?.decoded;
        let exhaustive = oracle_decode(&spec, &y, OracleLimits::default())?;
        instances += 1;
        if stitched != exhaustive {
            mismatches += 1;
            println!("seed {seed}: decoder {stitched:?} oracle {exhaustive:?}");
        }
    }
    println!("{instances} instances, {mismatches} mismatches");
    Ok(())
}
