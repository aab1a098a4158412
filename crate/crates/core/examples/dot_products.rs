//! The distribution of `x₁ · x₂` over pairs in `H_d`, compared with
//! representation counts of `d X² + 2e XY + d Y²` by the sum of three squares.
//!
//! `cargo run --example dot_products -- 101`

use linnik::arith::{dot_product_distribution, pall_count};
use linnik::lattice::count_hd;
use linnik::Budget;

fn main() -> linnik::Result<()> {
    let d: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(101);
    let budget = Budget::default();
    let dist = dot_product_distribution(d, &budget)?;
    let hd = count_hd(d)? as u128;
    let total: u128 = dist.values().sum();
    println!("|H_{d}|² = {} = Σ_e {total}", hd * hd);
    let di = d as i64;
    for (&e, &n) in &dist {
        let pall = if e.abs() < di { Some(pall_count(di, 2 * e, di, &budget)?) } else { None };
        println!("e = {e:>5}: {n:>6} pairs, representations {pall:?}");
    }
    Ok(())
}
