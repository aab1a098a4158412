//! The non-backtracking trajectory through a point of `H_d` and its period
//! modulo `SO₃(ℤ)`, compared with the order of a prime above 5 in the class
//! group.
//!
//! `cargo run --example trajectory -- 101 10,1,0 7`

use linnik::arith::{class_group, field_discriminant};
use linnik::lattice::LatticePoint;
use linnik::walk::{extend_trajectory, orbit_period};

fn main() -> linnik::Result<()> {
    let mut args = std::env::args().skip(1);
    let d: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(101);
    let x: LatticePoint = match args.next() {
        Some(s) => s.parse()?,
        None => LatticePoint::new(10, 1, 0),
    };
    let len: usize = args.next().and_then(|s| s.parse().ok()).unwrap_or(7);

    let seg = extend_trajectory(&x, len, d)?;
    print!("{x}");
    for (w, p) in seg.forward_word().iter().zip(seg.forward_points()) {
        print!(" -{w}-> {p}");
    }
    println!();

    let period = orbit_period(&x, d)?;
    let g = class_group(field_discriminant(d)?)?;
    let p5 = g.prime_above_form(5)?;
    let order = if d % 8 == 3 {
        g.element_order(&p5)?
    } else {
        g.order_modulo(&p5, &g.prime_above_form(2)?)?
    };
    println!("period {period}; h = {}; order of {p5} (mod the prime above 2 when d ≢ 3 mod 8) = {order}", g.order());
    Ok(())
}
