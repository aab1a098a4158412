use linnik::arith::{
    class_group, dot_pair_count, dot_product_distribution, field_discriminant, pall_count, perp_summary,
    sigma_dot_bound, verify_cardinality,
};
use linnik::equidist::dev_mod_q;
use linnik::lattice::{count_hd, enumerate_hd, is_squarefree, legendre_representable, so3z_orbits};
use linnik::modq_graph::{build_graph, enumerate_hdq};
use linnik::nbwalk::{count_centered_paths, centered_path_formula, enumerate_nb_paths, nb_path_count, ArcGraph};
use linnik::spectral::adjacency_spectrum;
use linnik::walk::{extend_trajectory, linnik_step, orbit_period, sigma_count};
use linnik::Budget;

fn admissible(limit: u64) -> impl Iterator<Item = u64> {
    (2..=limit).filter(|&d| is_squarefree(d) && matches!(d % 5, 1 | 4) && legendre_representable(d))
}

#[test]
fn sigma_bounded_by_dot_products() {
    let b = Budget::default();
    for d in admissible(700).filter(|d| d % 3 != 0) {
        for ell in 1..=3 {
            for q in [7u64, 11, 13] {
                if d % q == 0 {
                    continue;
                }
                let s = sigma_count(d, ell, q).unwrap();
                assert!(s >= count_hd(d).unwrap() as u128);
                assert!(s <= sigma_dot_bound(d, ell, q, &b).unwrap(), "d={d} ℓ={ell} q={q}");
            }
        }
    }
}

/// Merging the two congruences into one modulus `q²5^{2ℓ}` undercounts:
/// agreeing pairs may have `x′ ≡ x (mod q)` but `x′ ≡ −x (mod 5^ℓ)`.
#[test]
fn merged_modulus_bound_fails() {
    let (d, ell, q) = (74u64, 1usize, 7u64);
    let m = (q * q) as i64 * 25;
    let di = d as i64;
    let merged: u128 = count_hd(d).unwrap() as u128
        + dot_product_distribution(d, &Budget::default())
            .unwrap()
            .iter()
            .filter(|(&e, _)| e.abs() < di && ((e - di) % m == 0 || (e + di) % m == 0))
            .map(|(_, &k)| k)
            .sum::<u128>();
    assert_eq!(merged, 120);
    assert_eq!(sigma_count(d, ell, q).unwrap(), 144);
}

/// The trajectory realizes multiplication by a prime above 5 on
/// `H_d / SO₃(ℤ)`, which is `Pic` for `d ≡ 3 (mod 8)` and `Pic/⟨𝔮₂⟩`
/// otherwise (`𝔮₂` the ramified prime above 2).
#[test]
fn period_is_order_of_prime_above_five() {
    for d in admissible(1500) {
        let g = class_group(field_discriminant(d).unwrap()).unwrap();
        let p5 = g.prime_above_form(5).unwrap();
        let expected = if d % 8 == 3 {
            g.element_order(&p5).unwrap()
        } else {
            g.order_modulo(&p5, &g.prime_above_form(2).unwrap()).unwrap()
        };
        let points = enumerate_hd(d).unwrap();
        for orbit in so3z_orbits(&points, false).unwrap() {
            assert_eq!(orbit_period(&orbit.representative, d).unwrap(), expected, "d={d} x={}", orbit.representative);
        }
    }
}

#[test]
fn two_of_six_small_d() {
    for d in admissible(1000) {
        for x in enumerate_hd(d).unwrap() {
            linnik_step(&x, d).unwrap();
        }
    }
    let failures = admissible(1000)
        .map(|d| 5 * d)
        .filter(|&d| enumerate_hd(d).unwrap().iter().any(|x| linnik_step(x, d).is_err()))
        .count();
    assert!(failures > 0);
}

#[test]
fn pall_matches_dot_products() {
    let b = Budget::default();
    for d in [101u64, 89, 206, 94] {
        let di = d as i64;
        for (e, n) in dot_product_distribution(d, &b).unwrap() {
            if e.abs() < di {
                assert_eq!(pall_count(di, 2 * e, di, &b).unwrap(), n, "d={d} e={e}");
            } else {
                assert_eq!(n, count_hd(d).unwrap() as u128);
            }
        }
        assert_eq!(dot_pair_count(d, di, &b).unwrap(), count_hd(d).unwrap() as u128);
    }
}

#[test]
fn perp_and_cardinality_agree() {
    let b = Budget::default();
    for d in admissible(400) {
        let c = verify_cardinality(d, &b).unwrap();
        assert!(c.relation_holds, "d={d}");
        let s = perp_summary(d, &b).unwrap();
        assert_eq!(s.orbit_count, c.h, "d={d}");
        assert!(s.fibers_uniform && s.image_is_square_coset && s.discriminants_match, "d={d}");
    }
}

#[test]
fn trajectories_reduce_to_marked_paths() {
    for (d, q) in [(101u64, 7u64), (101, 11), (389, 7)] {
        let g = build_graph(d, q).unwrap();
        for x in enumerate_hd(d).unwrap() {
            let seg = extend_trajectory(&x, 3, d).unwrap();
            let path = g.reduce_segment(&seg).unwrap();
            assert!(g.is_marked_path(&path, &seg.letters));
        }
    }
}

#[test]
fn fibers_cover_the_graph() {
    for (d, q) in [(101u64, 7u64), (389, 11), (941, 13)] {
        let s = dev_mod_q(d, q, &Budget::default()).unwrap();
        let residues: Vec<[u64; 3]> = enumerate_hdq(d, q).unwrap().iter().map(|p| p.residues).collect();
        let cells: Vec<[u64; 3]> = s.cells.iter().map(|c| c.residue).collect();
        assert_eq!(cells, residues);
        assert!(s.bookkeeping_exact());
    }
}

#[test]
fn path_counts() {
    let b = Budget::default();
    let g = build_graph(101, 7).unwrap();
    let ag = ArcGraph::from_sphere_graph(&g);
    for len in 1..=4 {
        let listed = enumerate_nb_paths(&ag, len, &b).unwrap().count() as u128;
        assert_eq!(Some(listed), nb_path_count(&ag, len));
    }
    for ell in 1..=2 {
        assert_eq!(Some(count_centered_paths(&ag, ell, &b).unwrap()), centered_path_formula(&ag, ell));
    }
}

#[test]
fn graph_spectrum_sane() {
    let g = build_graph(149, 11).unwrap();
    let r = adjacency_spectrum(&g.graph, &Budget::default()).unwrap();
    let trace: f64 = r.eigenvalues.iter().sum();
    let loops: u32 = (0..g.graph.vertex_count()).map(|v| g.graph.multiplicity(v, v)).sum();
    assert!((trace - loops as f64).abs() < 1e-8);
    assert!(r.ramanujan);
}
