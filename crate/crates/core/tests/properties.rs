use std::sync::Arc;

use cmcsplit::complex::{build_regular_tree_ball, Complex};
use cmcsplit::group::{
    all_subgroups, averaging_idempotent, build_level_system, rooted_tree_automorphism_group,
    CellAction, FiniteGroup, LevelFamily, LinearRep, LocalAction,
};
use cmcsplit::linalg::{FieldSpec, Matrix, Rational, Scalar, Subspace};
use cmcsplit::resolution::{multi_level_alpha, smooth_product_decomposition, LevelMaps};
use cmcsplit::splitting::{
    construct_global_retraction, construct_global_section, random_extension, random_unimodular,
    LevelData,
};
use num_rational::BigRational;
use proptest::prelude::*;

fn field_strategy() -> impl Strategy<Value = FieldSpec> {
    prop_oneof![
        Just(FieldSpec::Rationals),
        Just(FieldSpec::prime(7).unwrap()),
        Just(FieldSpec::prime(2).unwrap())
    ]
}

fn matrix_strategy(max: usize) -> impl Strategy<Value = (FieldSpec, Vec<Vec<i64>>)> {
    (field_strategy(), 1..=max, 1..=max).prop_flat_map(|(f, r, c)| {
        (
            Just(f),
            prop::collection::vec(prop::collection::vec(-3i64..=3, c), r),
        )
    })
}

fn two_ball() -> (Arc<CellAction>, Arc<FiniteGroup>) {
    let c = Arc::new(build_regular_tree_ball(2, 2, 100).unwrap());
    let g = Arc::new(rooted_tree_automorphism_group(&c, 0, LocalAction::Symmetric, 100).unwrap());
    (
        Arc::new(CellAction::from_vertex_permutations(g.clone(), c).unwrap()),
        g,
    )
}

fn s3() -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::from_permutations(3, &[vec![1, 0, 2], vec![1, 2, 0]], 100).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn rank_plus_nullity((f, rows) in matrix_strategy(6)) {
        let m = Matrix::from_i64_rows(f, &rows);
        prop_assert_eq!(m.rank() + m.kernel().dim(), m.cols());
        prop_assert_eq!(m.image().dim(), m.rank());
        prop_assert_eq!(m.transpose().rank(), m.rank());
    }

    #[test]
    fn rational_products_match_bignum_arithmetic(
        (r, k, c) in (1usize..5, 1usize..5, 1usize..5),
        entries in prop::collection::vec(
            (prop_oneof![-6i64..=6, any::<i64>()], prop_oneof![1i64..=9, 1i64..=i64::MAX]),
            50,
        ),
    ) {
        let q = FieldSpec::Rationals;
        let mut it = entries.iter().cycle().map(|&(n, d)| Rational::new(n, d));
        let a: Vec<Rational> = it.by_ref().take(r * k).collect();
        let b: Vec<Rational> = it.take(k * c).collect();
        let wrap = |v: &[Rational]| v.iter().cloned().map(Scalar::Rat).collect::<Vec<_>>();
        let ma = Matrix::from_scalars(q, r, k, wrap(&a)).unwrap();
        let mb = Matrix::from_scalars(q, k, c, wrap(&b)).unwrap();
        let prod = ma.mul(&mb);
        for i in 0..r {
            for j in 0..c {
                let mut want = BigRational::from_integer(0.into());
                for t in 0..k {
                    want += a[i * k + t].to_big() * b[t * c + j].to_big();
                }
                prop_assert_eq!(prod.get(i, j), &Scalar::Rat(Rational::from_big(want)));
            }
        }
    }

    #[test]
    fn sum_and_intersection_dimensions((f, a) in matrix_strategy(5), b_seed in 0u64..1000) {
        let ambient = a[0].len();
        let sa = Subspace::from_rows(&Matrix::from_i64_rows(f, &a));
        let b = random_unimodular(f, ambient, b_seed).select_rows(&(0..ambient.div_ceil(2)).collect::<Vec<_>>());
        let sb = Subspace::from_rows(&b);
        let sum = sa.sum(&sb).unwrap();
        let meet = sa.intersect(&sb).unwrap();
        prop_assert_eq!(sum.dim() + meet.dim(), sa.dim() + sb.dim());
        prop_assert!(meet.is_subspace_of(&sa).unwrap() && meet.is_subspace_of(&sb).unwrap());
        prop_assert!(sa.is_subspace_of(&sum).unwrap() && sb.is_subspace_of(&sum).unwrap());
    }

    #[test]
    fn modular_law(seed in 0u64..1000) {
        // A ⊆ C implies A + (B ∩ C) = (A + B) ∩ C.
        let f = FieldSpec::Rationals;
        let u = random_unimodular(f, 5, seed);
        let w = random_unimodular(f, 5, seed + 1);
        let c = Subspace::from_rows(&u.select_rows(&[0, 1, 2]));
        let a = Subspace::from_rows(&u.select_rows(&[0]));
        let b = Subspace::from_rows(&w.select_rows(&[0, 1]));
        prop_assert!(a.is_subspace_of(&c).unwrap());
        prop_assert_eq!(a.sum(&b.intersect(&c).unwrap()).unwrap(), a.sum(&b).unwrap().intersect(&c).unwrap());
    }

    #[test]
    fn averaging_is_idempotent_onto_fixed_vectors(seed in 0u64..500) {
        let g = s3();
        let f = FieldSpec::Rationals;
        let rep = LinearRep::regular(g.clone(), f).conjugated(&random_unimodular(f, 6, seed)).unwrap();
        for u in all_subgroups(&g, 100).unwrap() {
            let e = averaging_idempotent(&u, &rep).unwrap();
            prop_assert!(e.is_idempotent().unwrap());
            prop_assert_eq!(e.image(), rep.fixed_subspace(&u));
            for &k in u.elements() {
                prop_assert_eq!(&rep.rho(k).mul(&e), &e);
            }
        }
    }

    #[test]
    fn hull_is_idempotent_and_monotone(picks in prop::collection::vec(0usize..15, 1..5), extra in 0usize..15) {
        let c = build_regular_tree_ball(2, 3, 100).unwrap();
        let nv = c.num_vertices();
        let small: Vec<usize> = picks.iter().map(|&p| p % nv).collect();
        let mut large = small.clone();
        large.push(extra % nv);
        let h = c.convex_hull_tree(&small).unwrap();
        let again = c.convex_hull_tree(&h.vertices(&c)).unwrap();
        prop_assert_eq!(&again, &h);
        prop_assert!(c.is_convex(&h).unwrap());
        let big = c.convex_hull_tree(&large).unwrap();
        prop_assert!(h.cells().iter().all(|&x| big.contains(x)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn support_projection_is_equivariant(picks in prop::collection::vec(0usize..10, 1..4), seed in 0u64..100) {
        let (a, g) = two_ball();
        let c = a.complex().clone();
        let f = FieldSpec::Rationals;
        let base = LinearRep::on_cells(&a, f, &[0]).unwrap();
        let rep = Arc::new(base.conjugated(&random_unimodular(f, base.dim(), seed)).unwrap());
        let fam = LevelFamily::ball_stabilizers(&a, 1, 1).unwrap();
        let sys = build_level_system(&a, &rep, &fam).unwrap().remove(0).derive_cell_idempotents().unwrap();
        let sigma = c.convex_hull_tree(&picks).unwrap();
        let rec = sys.verify_support_projection(&sigma).unwrap();
        prop_assert!(rec.passed(), "{:?}", rec);
        let elements: Vec<usize> = g.elements().collect();
        prop_assert!(sys.support_projection_equivariant(&a, &rep, &sigma, elements).unwrap());
    }

    #[test]
    fn level_differences_are_orthogonal_projectors(seed in 0u64..100) {
        let (a, _) = two_ball();
        let f = FieldSpec::Rationals;
        let base = LinearRep::on_cells(&a, f, &[0, 1]).unwrap();
        let rep = Arc::new(base.conjugated(&random_unimodular(f, base.dim(), seed)).unwrap());
        let fam = LevelFamily::exhaustive_ball_stabilizers(&a, 1, 10).unwrap();
        let systems: Vec<_> = build_level_system(&a, &rep, &fam)
            .unwrap()
            .into_iter()
            .map(|s| s.derive_cell_idempotents().unwrap())
            .collect();
        let lm = LevelMaps::build(systems, a, rep.clone()).unwrap();
        prop_assert!(multi_level_alpha(&lm.maps).unwrap().telescopes);
        let d = smooth_product_decomposition(&lm.composites()).unwrap();
        prop_assert!(d.passed());
        prop_assert_eq!(d.ranks.iter().sum::<usize>(), rep.dim());
    }

    #[test]
    fn global_splittings_certify(seed in 0u64..10_000) {
        let c = Arc::new(Complex::simplicial(4, &[vec![0, 1], vec![0, 2], vec![0, 3]]).unwrap());
        let g = Arc::new(rooted_tree_automorphism_group(&c, 0, LocalAction::Symmetric, 100).unwrap());
        let action = Arc::new(CellAction::from_vertex_permutations(g.clone(), c).unwrap());
        let family = LevelFamily::exhaustive_ball_stabilizers(&action, 1, 4).unwrap();
        let data = LevelData { action, family };
        let f = FieldSpec::Rationals;
        let total = Arc::new(LinearRep::regular(g, f).conjugated(&random_unimodular(f, 6, seed)).unwrap());
        let ext = random_extension(total, 1, seed).unwrap();
        let s = construct_global_section(&ext, &data).unwrap();
        prop_assert!(s.passed(), "{:?}", s.transcript);
        prop_assert_eq!(s.verify(&ext).unwrap().len(), 3);
        let r = construct_global_retraction(&ext, &data).unwrap();
        prop_assert!(r.passed(), "{:?}", r.transcript);
    }
}
