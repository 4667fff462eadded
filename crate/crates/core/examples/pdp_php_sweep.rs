//! Monte Carlo sweep of payload dropping and hallucination probabilities
//! over the erasure probability.
//!
//! ```text
//! cargo run --release --example pdp_php_sweep -- 100 100
//! ```
//! Arguments: users, trials per point.

use uace::{Estimate, LlcSpec};

fn main() -> uace::Result<()> {
    let mut args = std::env::args().skip(1);
    let users: usize = args.next().map_or(100, |a| a.parse().expect("users"));
    let trials: usize = args.next().map_or(50, |a| a.parse().expect("trials"));

    let spec = LlcSpec::new(16, 16, 8, 2, 7)?;
    println!("{:>6} {:>9} {:>9} {:>9} {:>9} {:>8}", "pe", "pdp", "±95%", "php", "±95%", "K̂");
    for pe in [0.0, 0.025, 0.05, 0.075, 0.1] {
        let row = Estimate::new(users, pe, trials, 7).run(&spec)?;
        println!(
            "{pe:>6} {:>9.4} {:>9.4} {:>9.5} {:>9.5} {:>8.2}",
            row.pdp, row.pdp_ci95, row.php, row.php_ci95, row.avg_khat
        );
    }
    Ok(())
}
