//! Spectra of the 6-regular graphs on `H_d(q)` and a Ramanujan survey over
//! a range of `d`.
//!
//! `cargo run --example ramanujan -- 7 11 13`

use linnik::lattice::{gcd, is_squarefree};
use linnik::modq_graph::{build_graph, survey_ramanujan};
use linnik::spectral::adjacency_spectrum;
use linnik::Budget;

fn main() -> linnik::Result<()> {
    let budget = Budget::default();
    let mut qs: Vec<u64> = std::env::args().skip(1).filter_map(|s| s.parse().ok()).collect();
    if qs.is_empty() {
        qs = vec![7, 11, 13];
    }

    let g = build_graph(101, 7)?;
    let r = adjacency_spectrum(&g.graph, &budget)?;
    println!(
        "H_101(7): {} vertices, λ₁ = {:.6}, max |λ_j| = {:.6}, bound {:.6}, ramanujan {}",
        r.vertex_count, r.eigenvalues[0], r.second_largest_abs, r.ramanujan_bound, r.ramanujan
    );

    let pairs: Vec<(u64, u64)> = qs
        .iter()
        .flat_map(|&q| (1..=500u64).filter(move |&d| is_squarefree(d) && matches!(d % 5, 1 | 4) && gcd(q, 30 * d) == 1).map(move |d| (d, q)))
        .collect();
    let rows = survey_ramanujan(&pairs, &budget)?;
    let failures = rows.iter().filter(|r| !r.ramanujan || r.top_multiplicity != 1).count();
    let worst = rows.iter().map(|r| r.second_largest_abs).fold(0.0, f64::max);
    println!("{} graphs with d ≤ 500, q ∈ {qs:?}: {failures} failures, max |λ| = {worst:.6}", rows.len());
    Ok(())
}
