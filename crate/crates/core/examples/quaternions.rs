//! The six rotations `A^±1, B^±1, C^±1` as conjugation by the norm-10
//! Hurwitz quaternions `1 ± 3i, 1 ± 3j, 1 ± 3k`.
//!
//! `cargo run --example quaternions`

use linnik::quaternion::{letter_matrix, quaternion_for_letter, rotation_of, Letter};

fn main() -> linnik::Result<()> {
    for w in Letter::ALL {
        let r = quaternion_for_letter(w);
        let m = rotation_of(&r)?;
        assert_eq!(m, letter_matrix(w));
        println!("{w:>5}: {r}  norm {}  matrix {m}  orthogonal {}", r.norm(), m.is_orthogonal());
    }
    Ok(())
}
