//! Rank, right inverse and row solving over GF(2).

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use uace::{BitMatrix, BitRow};

fn main() -> uace::Result<()> {
    let g = BitMatrix::from_rows(&[vec![1, 0, 1, 1], vec![0, 1, 1, 0]])?;
    println!("G =\n{g}");
    println!("rank(G) = {}", g.rank());

    let h = g.right_inverse()?;
    println!("right inverse H =\n{h}");
    println!("G·H =\n{}", g.mul(&h)?);

    let t = BitRow::from_bits(&[1, 1, 0, 1]);
    match g.solve_row(&t, &h)? {
        Some(x) => println!("x·G = {t} has solution x = {x}"),
        None => println!("x·G = {t} has no solution"),
    }
    let t = BitRow::from_bits(&[1, 0, 0, 0]);
    match g.solve_row(&t, &h)? {
        Some(x) => println!("x·G = {t} has solution x = {x}"),
        None => println!("x·G = {t} has no solution"),
    }

    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let big = BitMatrix::random_full_rank(8, 8, &mut rng)?;
    println!("random 8x8 full-rank matrix, rank {}", big.rank());
    Ok(())
}
