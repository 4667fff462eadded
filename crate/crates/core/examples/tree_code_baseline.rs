//! Tree code versus linked-loop code at the same geometry. The tree code
//! loses a user on any erasure; the linked-loop code survives one.

use uace::metrics::{any_erasure_prob, llc_single_user_pdp};
use uace::tree::DEFAULT_PROFILE;
use uace::{Estimate, LlcSpec, TreeSpec};

fn main() -> uace::Result<()> {
    let tc = TreeSpec::with_payload(128, 16, DEFAULT_PROFILE.to_vec(), 1)?;
    let llc = LlcSpec::new(16, 16, 8, 2, 1)?;
    println!("tree profile {:?}", tc.profile());
    println!("{:>6} {:>10} {:>10} {:>10} {:>10}", "pe", "tc pdp", "tc law", "llc pdp", "llc law");
    for pe in [0.025, 0.05, 0.1] {
        let t = Estimate::new(1, pe, 4000, 5).run(&tc)?;
        let l = Estimate::new(1, pe, 4000, 5).run(&llc)?;
        println!(
            "{pe:>6} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            t.pdp,
            any_erasure_prob(pe, 16),
            l.pdp,
            llc_single_user_pdp(pe, 16)
        );
    }
    Ok(())
}
