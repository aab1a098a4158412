//! Equidistribution statistics: fiber deviations of `H_d → H_d(q)`, cap
//! deviations at random centers, and Hecke-tree cap discrepancies.
//!
//! `cargo run --example equidistribution`

use linnik::equidist::{cap_stats, dev_mod_q, hecke_equidist_check, hecke_layer, standard_caps};
use linnik::lattice::LatticePoint;
use linnik::Budget;

fn main() -> linnik::Result<()> {
    let budget = Budget::default();
    for d in [94, 989, 9994, 99989] {
        let s = dev_mod_q(d, 7, &budget)?;
        println!(
            "d = {d:>6}: |H_d| = {:>5}, |H_d(7)| = {}, max |dev| = {:.4}, fraction above 1/2 = {:.4}",
            s.hd,
            s.hdq,
            s.max_abs_deviation,
            s.fraction_above(0.5)
        );
    }
    for d in [9994u64, 99989] {
        let c = cap_stats(d, 0.3, 2000, 7, 0.25, &budget)?;
        println!("caps ρ = 0.3, d = {d}: fraction with |dev| ≥ 0.25 is {:.4} ± {:.4}", c.fraction_bad, c.half_width);
    }
    let x = LatticePoint::new(10, 1, 0);
    for ell in [2, 4, 6, 8] {
        let layer = hecke_layer(&x, ell, &budget)?;
        let caps = hecke_equidist_check(&x, ell, &standard_caps(), &budget)?;
        let worst = caps.iter().map(|c| c.discrepancy).fold(0.0, f64::max);
        println!("Hecke ℓ = {ell}: {} words, {} distinct vectors, max cap discrepancy {worst:.5}", layer.nodes.len(), layer.distinct_vectors);
    }
    Ok(())
}
