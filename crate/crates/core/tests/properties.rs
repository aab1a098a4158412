use linnik::arith::{class_group, BinaryForm};
use linnik::equidist::{cap_deviation, hecke_layer};
use linnik::graph::Multigraph;
use linnik::lattice::{enumerate_hd, LatticePoint};
use linnik::modq_graph::build_graph;
use linnik::nbwalk::{exact_walk_probability, qi_bound};
use linnik::quaternion::Letter;
use linnik::spectral::symmetric_eigenvalues;
use linnik::walk::{extend_trajectory, extend_trajectory_oriented, linnik_step};
use linnik::Budget;
use proptest::prelude::*;
use proptest::sample::{select, Index};

fn discriminant() -> impl Strategy<Value = i64> {
    (3i64..=2000).prop_filter_map("not a discriminant", |n| matches!(n % 4, 0 | 3).then_some(-n))
}

/// `f(αX + βY, γX + δY)` for `αδ − βγ = 1`.
fn transform(f: &BinaryForm, m: [i64; 4]) -> BinaryForm {
    let [al, be, ga, de] = m;
    BinaryForm::new(
        f.a * al * al + f.b * al * ga + f.c * ga * ga,
        2 * f.a * al * be + f.b * (al * de + be * ga) + 2 * f.c * ga * de,
        f.a * be * be + f.b * be * de + f.c * de * de,
    )
}

fn sl2() -> impl Strategy<Value = [i64; 4]> {
    prop::collection::vec(select(vec![[1i64, 1, 0, 1], [1, -1, 0, 1], [0, -1, 1, 0], [1, 0, 1, 1]]), 0..6).prop_map(|ms| {
        ms.into_iter().fold([1, 0, 0, 1], |[a, b, c, d], [e, f, g, h]| [a * e + b * g, a * f + b * h, c * e + d * g, c * f + d * h])
    })
}

const SPHERES: &[u64] = &[101, 389, 149, 206, 341, 421];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn class_group_axioms(disc in discriminant(), i in any::<Index>(), j in any::<Index>(), k in any::<Index>()) {
        let g = class_group(disc).unwrap();
        let (f, h, l) = (*i.get(&g.forms), *j.get(&g.forms), *k.get(&g.forms));
        let e = g.identity();
        prop_assert_eq!(g.compose(&f, &e).unwrap(), f);
        prop_assert_eq!(g.compose(&f, &h).unwrap(), g.compose(&h, &f).unwrap());
        prop_assert_eq!(
            g.compose(&g.compose(&f, &h).unwrap(), &l).unwrap(),
            g.compose(&f, &g.compose(&h, &l).unwrap()).unwrap()
        );
        prop_assert_eq!(g.compose(&f, &g.inverse(&f).unwrap()).unwrap(), e);
        let n = g.element_order(&f).unwrap();
        prop_assert_eq!(g.order() as u64 % n, 0);
        prop_assert_eq!(g.pow(&f, n).unwrap(), e);
        for form in &g.forms {
            prop_assert!(form.is_reduced() && form.is_primitive());
            prop_assert_eq!(form.discriminant(), disc as i128);
        }
    }

    #[test]
    fn reduction_is_a_class_invariant(disc in discriminant(), i in any::<Index>(), m in sl2()) {
        let g = class_group(disc).unwrap();
        let f = *i.get(&g.forms);
        let t = transform(&f, m);
        prop_assert_eq!(t.discriminant(), f.discriminant());
        prop_assert_eq!(t.reduce().unwrap(), f);
    }

    #[test]
    fn spectrum_is_permutation_invariant(pair in select(vec![(101u64, 7u64), (101, 11), (389, 7), (149, 11)]), seed in any::<u64>()) {
        let g = build_graph(pair.0, pair.1).unwrap().graph;
        let n = g.vertex_count();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut s = seed;
        for i in (1..n).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let h = g.permuted(&perm).unwrap();
        let a = symmetric_eigenvalues(g.dense(), n).unwrap();
        let b = symmetric_eigenvalues(h.dense(), n).unwrap();
        for (x, y) in a.iter().zip(&b) {
            prop_assert!((x - y).abs() < 1e-9);
        }
    }

    #[test]
    fn eigensolver_matches_nalgebra(n in 1usize..24, entries in prop::collection::vec(-5.0f64..5.0, 576)) {
        let mut a = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..=i {
                a[i * n + j] = entries[i * 24 + j];
                a[j * n + i] = entries[i * 24 + j];
            }
        }
        let ours = symmetric_eigenvalues(a.clone(), n).unwrap();
        let mut theirs: Vec<f64> = nalgebra::DMatrix::from_row_slice(n, n, &a).symmetric_eigenvalues().iter().copied().collect();
        theirs.sort_by(|x, y| y.total_cmp(x));
        for (x, y) in ours.iter().zip(&theirs) {
            prop_assert!((x - y).abs() < 1e-9 * (1.0 + y.abs()), "{} vs {}", x, y);
        }
    }

    #[test]
    fn letters_preserve_norm(x in -50i64..50, y in -50i64..50, z in -50i64..50) {
        let p = LatticePoint::new(x, y, z);
        for w in Letter::ALL {
            let q = w.apply_scaled(&p);
            prop_assert_eq!(q.norm(), 25 * p.norm());
            prop_assert_eq!(w.inverse().apply_scaled(&q), LatticePoint::new(25 * x, 25 * y, 25 * z));
        }
    }

    #[test]
    fn trajectory_reversal(d in select(SPHERES.to_vec()), i in any::<Index>(), ell in 1usize..6) {
        let points = enumerate_hd(d).unwrap();
        let x = *i.get(&points);
        let g = extend_trajectory(&x, ell, d).unwrap();
        g.validate().unwrap();
        let [_, other] = linnik_step(&x, d).unwrap();
        let h = extend_trajectory_oriented(&x, ell, d, other.0).unwrap();
        prop_assert_eq!(h, g.reversed());
        prop_assert_eq!(g.reversed().reversed(), g);
    }

    #[test]
    fn hecke_norms(d in select(SPHERES.to_vec()), i in any::<Index>(), ell in 0usize..5) {
        let x = *i.get(&enumerate_hd(d).unwrap());
        let layer = hecke_layer(&x, ell, &Budget::default()).unwrap();
        let expected = if ell == 0 { 1 } else { 6 * 5usize.pow(ell as u32 - 1) };
        prop_assert_eq!(layer.nodes.len(), expected);
        for node in &layer.nodes {
            prop_assert_eq!(node.vector.norm(), d as u128 * 25u128.pow(ell as u32));
            prop_assert_eq!(node.word.len(), ell);
        }
    }

    #[test]
    fn caps_are_centrally_symmetric(d in select(SPHERES.to_vec()), c in prop::array::uniform3(-1.0f64..1.0), rho in 0.1f64..3.1) {
        prop_assume!(c.iter().map(|v| v * v).sum::<f64>() > 1e-6);
        let b = Budget::default();
        let neg = c.map(|v| -v);
        prop_assert_eq!(cap_deviation(d, c, rho, &b).unwrap(), cap_deviation(d, neg, rho, &b).unwrap());
    }

    #[test]
    fn point_and_letter_parsing(x in any::<i32>(), y in any::<i32>(), z in any::<i32>(), w in select(Letter::ALL.to_vec())) {
        let p = LatticePoint::new(x as i64, y as i64, z as i64);
        prop_assert_eq!(p.to_string().parse::<LatticePoint>().unwrap(), p);
        prop_assert_eq!(w.to_string().parse::<Letter>().unwrap(), w);
    }

    #[test]
    fn qi_bound_dominates_on_k8(sets in prop::collection::vec(prop::collection::vec(any::<bool>(), 8), 1..6)) {
        prop_assume!(sets.iter().all(|s| s.iter().any(|&b| b)));
        let g = Multigraph::complete(8);
        let (num, den) = exact_walk_probability(&g, &sets).unwrap();
        let mus: Vec<f64> = sets.iter().map(|s| s.iter().filter(|&&b| b).count() as f64 / 8.0).collect();
        let bound = qi_bound(&mus, 1.0 / 7.0).unwrap();
        prop_assert!(num as f64 / den as f64 <= bound + 1e-12);
    }
}
