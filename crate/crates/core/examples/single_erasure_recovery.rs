//! Recovers an erased section from the parity equations that touch it, then
//! lets the two-phase decoder do the same from a channel output.

use std::collections::BTreeSet;

use uace::{decode, ChannelOutput, LlcSpec, Path, Payload};

fn main() -> uace::Result<()> {
    let spec = LlcSpec::new(16, 16, 8, 2, 2024)?;
    let w = Payload::from_hex("c0ffee00c0ffee00c0ffee00c0ffee00", 128)?;
    let cw = spec.encode(&w)?;

    let path = Path::with_erasure(&cw, 9);
    let verdict = spec.check_parity_with_recovery(&path)?;
    println!(
        "erased section 9: consistent={} recovered={:?} truth={}",
        verdict.consistent,
        verdict.recovered.map(|r| r.to_string()),
        w.bits().slice(72, 8)
    );

    for erased in [0, 1, 9, 15] {
        let lists = cw
            .sections()
            .iter()
            .enumerate()
            .map(|(l, &s)| if l == erased { Vec::new() } else { vec![s] })
            .collect();
        let result = decode(&spec, &ChannelOutput::new(16, lists))?;
        let outcome = if result.decoded == BTreeSet::from([w.clone()]) {
            format!("recovered (phase 1: {}, phase 2: {})", result.phase1_count, result.phase2_count)
        } else {
            format!("lost, {} payloads decoded", result.decoded.len())
        };
        println!("section {erased:2} erased: {outcome}");
    }
    Ok(())
}
