//! Writes the graph on `H_d(q)` as JSON for use with external tools.
//!
//! `cargo run --example export_graph -- 101 7 > graph.json`

use linnik::modq_graph::build_graph;

fn main() -> linnik::Result<()> {
    let mut args = std::env::args().skip(1).map(|s| s.parse::<u64>().ok());
    let d = args.next().flatten().unwrap_or(101);
    let q = args.next().flatten().unwrap_or(7);
    let g = build_graph(d, q)?;
    println!("{}", serde_json::to_string_pretty(&g.export()).expect("serializable"));
    Ok(())
}
