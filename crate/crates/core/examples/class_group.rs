//! Class groups from reduced binary forms, the perp map `x ↦ x^⊥` from
//! `H_d` into the class group, and `|H_d| = 12h` or `24h`.
//!
//! `cargo run --example class_group -- 101`

use linnik::arith::{class_group, field_discriminant, perp_summary, verify_cardinality};
use linnik::Budget;

fn main() -> linnik::Result<()> {
    let d: u64 = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(101);
    let budget = Budget::default();
    let disc = field_discriminant(d)?;
    let g = class_group(disc)?;
    println!("D = {disc}: h = {}, cyclic {}, |Pic[2]| = {}", g.order(), g.is_cyclic()?, g.two_torsion_count()?);
    for f in &g.forms {
        println!("  {f} of order {}", g.element_order(f)?);
    }
    let c = verify_cardinality(d, &budget)?;
    println!("|H_{d}| = {} = {}·{}: {}", c.hd, c.factor, c.h, c.relation_holds);
    let s = perp_summary(d, &budget)?;
    println!(
        "perp map: {} orbits onto {} classes; fibers uniform {}; image is a coset of squares {}",
        s.orbit_count,
        s.fibers.len(),
        s.fibers_uniform,
        s.image_is_square_coset
    );
    Ok(())
}
