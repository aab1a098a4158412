//! Integer points on the sphere `x² + y² + z² = d` and their orbits under
//! the signed permutation group.
//!
//! `cargo run --example sphere_points -- 101`

use linnik::lattice::{enumerate_hd, legendre_representable, so3z_orbits};

fn main() -> linnik::Result<()> {
    let d: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(101);
    if !legendre_representable(d) {
        println!("{d} is of the form 4^a(8b + 7): no points");
        return Ok(());
    }
    let points = enumerate_hd(d)?;
    println!("|H_{d}| = {}", points.len());
    for (label, even) in [("SO3(Z)", false), ("SO3(Z)+", true)] {
        let orbits = so3z_orbits(&points, even)?;
        println!("{} orbits under {label}", orbits.len());
        if !even {
            for o in &orbits {
                println!("  {} ({} points)", o.representative, o.members.len());
            }
        }
    }
    Ok(())
}
