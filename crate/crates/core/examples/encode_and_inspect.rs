//! Builds the 128-bit linked-loop code, encodes a payload and checks it.
//!
//! ```text
//! cargo run --example encode_and_inspect
//! ```

use uace::{BitRow, LlcSpec, Path, Payload};

fn main() -> uace::Result<()> {
    // 16 sections of 16 bits, 8 information bits each, memory 2.
    let spec = LlcSpec::new(16, 16, 8, 2, 2024)?;
    println!(
        "L={} J={} m={} M={} B={} rate={:.3}",
        spec.sections(),
        spec.section_bits(),
        spec.info_bits(),
        spec.memory(),
        spec.payload_bits(),
        spec.rate()
    );
    println!("G_1 =\n{}", spec.generator(1));

    let w = Payload::from_hex("0123456789abcdeffedcba9876543210", 128)?;
    let cw = spec.encode(&w)?;
    let m = spec.info_bits();
    for (l, s) in cw.sections().iter().enumerate() {
        let info = BitRow::from_word(s.info(m), m);
        let parity = BitRow::from_word(s.parity(m), spec.parity_bits());
        println!("v({l:2}) = info {info}  parity {parity}");
    }

    let path = Path::from_codeword(&cw);
    println!("parity checks hold: {}", spec.check_parity(&path));
    println!("round trip: {}", spec.extract_info_bits(&path)? == w);

    // One flipped parity bit breaks exactly the equations that read it.
    let mut sections = cw.sections().to_vec();
    sections[7].0 ^= 1 << m;
    let broken = Path::from_codeword(&uace::Codeword::new(sections));
    println!("after flipping a parity bit of section 7: {}", spec.check_parity(&broken));
    Ok(())
}
