//! One multi-user round: sample payloads, transmit through the erasure
//! channel, decode, and score the decoded list.
//!
//! ```text
//! cargo run --release --example channel_simulation -- 100 0.05 3
//! ```
//! Arguments: users, erasure probability, seed.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use uace::{sample_payloads, score_trial, transmit, ChannelParams, Decoder, LlcSpec};

fn main() -> uace::Result<()> {
    let mut args = std::env::args().skip(1);
    let users: usize = args.next().map_or(100, |a| a.parse().expect("users"));
    let pe: f64 = args.next().map_or(0.05, |a| a.parse().expect("erasure probability"));
    let seed: u64 = args.next().map_or(3, |a| a.parse().expect("seed"));

    let spec = LlcSpec::new(16, 16, 8, 2, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sent = sample_payloads(users, spec.payload_bits(), &mut rng)?;
    let codewords = sent.iter().map(|w| spec.encode(w)).collect::<uace::Result<Vec<_>>>()?;
    let (y, mask) = transmit(&codewords, spec.section_bits(), &ChannelParams::new(users, pe)?, &mut rng)?;

    let sizes: Vec<usize> = y.lists().iter().map(Vec::len).collect();
    println!("{} symbols erased; list sizes {sizes:?}", mask.count());
    let per_user: Vec<usize> = (0..users)
        .map(|k| mask.user(k).iter().filter(|&&e| e).count())
        .collect();
    for n in 0..=2 {
        let count = per_user.iter().filter(|&&c| c == n).count();
        println!("users with {n} erasures: {count}");
    }
    println!("users with more: {}", per_user.iter().filter(|&&c| c > 2).count());

    let result = Decoder::new(&spec).decode(&y)?;
    let score = score_trial(&sent, &result.decoded);
    println!(
        "decoded {} payloads ({} in phase 1, {} more in phase 2)",
        result.decoded.len(),
        result.phase1_count,
        result.phase2_count
    );
    println!(
        "dropped {} of {users}, hallucinated {}: pdp={:.4} php={:.4}",
        score.dropped,
        score.hallucinated,
        score.pdp(),
        score.php()
    );
    Ok(())
}
