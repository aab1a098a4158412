//! Trajectories that agree for `2ℓ` steps are exactly the points congruent
//! up to sign mod `5^ℓ`; also counts the pairs Σ(d, ℓ, q) whose segments
//! agree mod `q`, with the dot-product bound.
//!
//! `cargo run --example shadowing -- 389 3 7`

use linnik::arith::sigma_dot_bound;
use linnik::lattice::enumerate_hd;
use linnik::walk::{shadowing_check, sigma_count};
use linnik::Budget;

fn main() -> linnik::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<u64>().ok());
    let d = args.next().flatten().unwrap_or(389);
    let ell = args.next().flatten().unwrap_or(3) as usize;
    let q = args.next().flatten().unwrap_or(7);

    let points = enumerate_hd(d)?;
    for l in 1..=ell {
        let (mut agree, mut mismatch) = (0, 0);
        for x in &points {
            for y in &points {
                let s = shadowing_check(x, y, l, d)?;
                agree += s.words_agree as usize;
                mismatch += (s.words_agree != s.congruent) as usize;
            }
        }
        println!("ℓ = {l}: {agree} agreeing ordered pairs, {mismatch} disagreements with x ≡ ±x′ mod 5^{l}");
    }
    let s = sigma_count(d, ell, q)?;
    let bound = sigma_dot_bound(d, ell, q, &Budget::default())?;
    println!("Σ({d}, {ell}, {q}) = {s} ≤ {bound}; |H_d| = {}", points.len());
    Ok(())
}
