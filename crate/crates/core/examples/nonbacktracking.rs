//! Non-backtracking walks on `H_d(q)`: the arc-graph spectrum predicted
//! from the adjacency spectrum, centered path counts, and large deviations
//! of visits to a random set.
//!
//! `cargo run --example nonbacktracking`

use linnik::modq_graph::build_graph;
use linnik::nbwalk::{
    centered_path_formula, count_centered_paths, large_deviation_stats, power_trace_check, predicted_arc_spectrum,
    random_subset, ArcGraph, DeviationMode,
};
use linnik::spectral::adjacency_spectrum;
use linnik::Budget;

fn main() -> linnik::Result<()> {
    let budget = Budget::default();
    let g = build_graph(101, 7)?;
    let ag = ArcGraph::from_sphere_graph(&g);
    let spec = adjacency_spectrum(&g.graph, &budget)?;
    let eigs: Vec<f64> = spec.eigenvalues.iter().map(|l| l / 6.0).collect();
    let t = ag.power_traces(2, &budget)?;
    let pred = predicted_arc_spectrum(&eigs, ag.vertex_count(), ag.arc_count(), 6, t[0], t[1])?;
    let disc = power_trace_check(&ag, &pred, 12, &budget)?;
    println!(
        "{} arcs; new space +1/5 ×{}, −1/5 ×{}; nontrivial radius {:.6} (1/√5 = {:.6}); trace discrepancy {disc:.1e}",
        ag.arc_count(),
        pred.new_plus,
        pred.new_minus,
        pred.nontrivial_radius(),
        1.0 / 5f64.sqrt()
    );

    for ell in 1..=3 {
        println!(
            "ℓ = {ell}: {} centered paths (formula {:?})",
            count_centered_paths(&ag, ell, &budget)?,
            centered_path_formula(&ag, ell)
        );
    }

    let in_b = random_subset(ag.vertex_count(), 0.3, 1)?;
    for ell in [2, 4, 8, 16] {
        let r = large_deviation_stats(&ag, &in_b, ell, 0.15, DeviationMode::Exhaustive)?;
        println!("ℓ = {ell:>2}: fraction with |visits/(2ℓ+1) − μ| ≥ 0.15 is {:.6}", r.fraction_violating);
    }
    Ok(())
}
