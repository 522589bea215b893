use std::sync::Arc;

use super::*;
use crate::complex::{build_regular_tree_ball, Complex};
use crate::group::{
    all_subgroups, rooted_tree_automorphism_group, CellAction, LevelFamily, LocalAction,
};
use crate::resolution::BlockSpace;

const Q: FieldSpec = FieldSpec::Rationals;

fn s3() -> Arc<FiniteGroup> {
    Arc::new(FiniteGroup::from_permutations(3, &[vec![1, 0, 2], vec![1, 2, 0]], 100).unwrap())
}

fn point_data(group: Arc<FiniteGroup>) -> LevelData {
    let c = Arc::new(build_regular_tree_ball(2, 0, 10).unwrap());
    let action =
        Arc::new(CellAction::from_images(group.clone(), c, &vec![vec![0]; group.order()]).unwrap());
    let family = LevelFamily::explicit(&action, vec![vec![Subgroup::trivial()]]).unwrap();
    LevelData { action, family }
}

fn star(field: FieldSpec) -> (LevelData, Arc<LinearRep>) {
    let c = Arc::new(build_regular_tree_ball(2, 1, 100).unwrap());
    let g = Arc::new(rooted_tree_automorphism_group(&c, 0, LocalAction::Symmetric, 100).unwrap());
    let action = Arc::new(CellAction::from_vertex_permutations(g.clone(), c).unwrap());
    let family = LevelFamily::exhaustive_ball_stabilizers(&action, 1, 4).unwrap();
    (
        LevelData { action, family },
        Arc::new(LinearRep::regular(g, field)),
    )
}

fn trivial_extension(dim: usize, seed: u64) -> Extension {
    let g = Arc::new(FiniteGroup::trivial());
    let total = Arc::new(LinearRep::from_matrices(g, Q, vec![Matrix::identity(Q, dim)]).unwrap());
    random_extension(total, 2, seed).unwrap()
}

#[test]
fn trivial_group_extension_is_valid() {
    for seed in 0..5 {
        let ext = trivial_extension(5, seed);
        assert_eq!(ext.sub.dim() + ext.quotient.dim(), 5);
        assert!(ext.projection.mul(&ext.inclusion).is_zero());
        assert!(ext.projection.mul(&ext.canonical_section()).is_identity());
        assert!(ext.canonical_retraction().mul(&ext.inclusion).is_identity());
    }
}

#[test]
fn regular_minus_trivial_line() {
    let g = s3();
    let total = Arc::new(LinearRep::regular(g.clone(), Q));
    let line = total.fixed_subspace(&Subgroup::whole(&g));
    // The regular representation contains the trivial one exactly once.
    assert_eq!(line.dim(), 1);
    let ext = Extension::from_invariant_subspace(total, &line).unwrap();
    assert_eq!(ext.quotient.dim(), 5);
    assert_eq!(ext.sub.dim(), 1);
}

#[test]
fn random_extension_is_deterministic() {
    let g = s3();
    let total = Arc::new(LinearRep::regular(g, Q));
    let a = random_extension(total.clone(), 1, 42).unwrap();
    let b = random_extension(total, 1, 42).unwrap();
    assert_eq!(a.hashes(), b.hashes());
    assert_eq!(
        serde_json::to_vec(&MatrixRecord::from(a.projection)).unwrap(),
        serde_json::to_vec(&MatrixRecord::from(b.projection)).unwrap()
    );
}

#[test]
fn rejects_non_exact_data() {
    let g = s3();
    let total = Arc::new(LinearRep::regular(g.clone(), Q));
    let sub = Arc::new(LinearRep::trivial(g.clone(), Q));
    let quo = Arc::new(LinearRep::regular(g, Q));
    let i = Matrix::zeros(Q, 6, 1);
    let p = Matrix::identity(Q, 6);
    assert!(matches!(
        Extension::new(sub, total, quo, i, p),
        Err(Error::InvalidExtension(_))
    ));
}

#[test]
fn local_section_trivial_subgroup_is_canonical() {
    let ext = trivial_extension(4, 3);
    let s = local_equivariant_section(&ext, &Subgroup::trivial()).unwrap();
    assert_eq!(s, ext.canonical_section());
}

#[test]
fn local_section_whole_group_is_equivariant() {
    let g = s3();
    for seed in 0..4 {
        let total = Arc::new(LinearRep::regular(g.clone(), Q));
        let ext = random_extension(total, 1, seed).unwrap();
        let s = local_equivariant_section(&ext, &Subgroup::whole(&g)).unwrap();
        assert!(ext.projection.mul(&s).is_identity());
        for e in g.elements() {
            assert_eq!(ext.total.rho(e).mul(&s), s.mul(ext.quotient.rho(e)));
        }
        let r = local_equivariant_retraction(&ext, &Subgroup::whole(&g)).unwrap();
        assert!(r.mul(&ext.inclusion).is_identity());
        assert!(intertwines(&r, &ext.total, &ext.sub, g.elements()));
    }
}

#[test]
fn local_section_order_three_over_f3() {
    let g = s3();
    let f3 = FieldSpec::prime(3).unwrap();
    let total = Arc::new(LinearRep::regular(g.clone(), f3));
    let ext = random_extension(total, 1, 7).unwrap();
    let c3 = all_subgroups(&g, 100)
        .unwrap()
        .into_iter()
        .find(|s| s.order() == 3)
        .unwrap();
    match local_equivariant_section(&ext, &c3) {
        Err(Error::BadCharacteristic {
            characteristic: 3,
            subgroup,
        }) => assert_eq!(subgroup.order, 3),
        other => panic!("expected a characteristic failure, got {other:?}"),
    }
}

#[test]
fn global_constructions_on_trivial_group() {
    let ext = trivial_extension(4, 9);
    let data = point_data(ext.group().clone());
    let s = construct_global_section(&ext, &data).unwrap();
    assert!(s.passed(), "{:?}", s.transcript);
    assert_eq!(s.map().unwrap(), ext.canonical_section());
    let r = construct_global_retraction(&ext, &data).unwrap();
    assert!(r.passed(), "{:?}", r.transcript);
    assert_eq!(r.map().unwrap(), ext.canonical_retraction());
}

#[test]
fn star_certificates_over_rationals() {
    let (data, total) = star(Q);
    for seed in 0..3 {
        let ext = random_extension(total.clone(), 1, seed).unwrap();
        assert!(ext.sub.dim() > 0 && ext.quotient.dim() > 0);
        let s = construct_global_section(&ext, &data).unwrap();
        assert!(s.passed(), "{:?}", s.transcript);
        assert_eq!(s.scope, EquivarianceScope::Global);
        // Independent check against the raw matrices.
        let m = s.map().unwrap();
        assert!(ext.projection.mul(&m).is_identity());
        for e in ext.group().elements() {
            assert_eq!(ext.total.rho(e).mul(&m), m.mul(ext.quotient.rho(e)));
        }
        let r = construct_global_retraction(&ext, &data).unwrap();
        assert!(r.passed(), "{:?}", r.transcript);
        let m = r.map().unwrap();
        assert!(m.mul(&ext.inclusion).is_identity());
        for e in ext.group().elements() {
            assert_eq!(ext.sub.rho(e).mul(&m), m.mul(ext.total.rho(e)));
        }
    }
}

#[test]
fn star_over_f2_names_an_even_stabilizer() {
    let f2 = FieldSpec::prime(2).unwrap();
    let (data, total) = star(f2);
    let ext = random_extension(total, 1, 5).unwrap();
    for result in [
        construct_global_section(&ext, &data),
        construct_global_retraction(&ext, &data),
    ] {
        match result {
            Err(Error::BadCharacteristic {
                characteristic: 2,
                subgroup,
            }) => {
                assert_eq!(subgroup.order % 2, 0);
                let named =
                    Subgroup::from_elements(ext.group(), subgroup.elements.clone()).unwrap();
                let stabilizers: Vec<Subgroup> = data
                    .action
                    .orbit_representatives()
                    .into_iter()
                    .map(|c| data.action.stabilizer(c))
                    .collect();
                assert!(stabilizers.contains(&named));
            }
            other => panic!("expected a characteristic failure, got {other:?}"),
        }
    }
}

#[test]
fn lifting_the_inclusion_gives_pi() {
    let (data, v) = star(Q);
    let sys = crate::group::build_level_system(&data.action, &v, &data.family)
        .unwrap()
        .remove(0)
        .derive_cell_idempotents()
        .unwrap();
    let space = BlockSpace::new(sys, data.action.clone(), v.clone()).unwrap();
    let pi = space.pi();
    let mut total = Matrix::zeros(Q, v.dim(), space.dim());
    for sigma in data.action.orbit_representatives() {
        let lift = frobenius_lift(&space, sigma, space.basis(sigma), &v).unwrap();
        for tau in 0..space.num_cells() {
            let cols: Vec<usize> = space.block_range(tau).collect();
            let expected = if data.action.orbit(sigma).contains(&tau) {
                pi.select_cols(&cols)
            } else {
                Matrix::zeros(Q, v.dim(), cols.len())
            };
            assert_eq!(lift.select_cols(&cols), expected);
        }
        total.add_assign(&lift);
    }
    assert_eq!(total, pi);
}

#[test]
fn lifting_rejects_non_equivariant_maps() {
    let (data, v) = star(Q);
    let sys = crate::group::build_level_system(&data.action, &v, &data.family)
        .unwrap()
        .remove(0)
        .derive_cell_idempotents()
        .unwrap();
    let space = BlockSpace::new(sys, data.action.clone(), v.clone()).unwrap();
    // The centre is fixed by all of S3, so a rank-one map onto a single basis
    // vector cannot commute with it.
    let centre = 0;
    let r = space.rank(centre);
    let mut h = Matrix::zeros(Q, v.dim(), r);
    h.set(0, 0, Q.one());
    assert!(matches!(
        frobenius_lift(&space, centre, &h, &v),
        Err(Error::NotLocallyEquivariant(0))
    ));
}

#[test]
fn lifting_on_trivial_group_is_the_map() {
    let g = Arc::new(FiniteGroup::trivial());
    let c = Arc::new(Complex::simplicial(2, &[vec![0, 1]]).unwrap());
    let action = Arc::new(CellAction::from_vertex_permutations(g.clone(), c.clone()).unwrap());
    let v = Arc::new(LinearRep::from_matrices(g, Q, vec![Matrix::identity(Q, 2)]).unwrap());
    let sys = crate::idempotents::IdempotentSystem::new(c, Q, 2, vec![Matrix::identity(Q, 2); 2])
        .unwrap()
        .derive_cell_idempotents()
        .unwrap();
    let space = BlockSpace::new(sys, action, v.clone()).unwrap();
    let h = Matrix::from_i64_rows(Q, &[vec![1, 2], vec![3, 4]]);
    let lift = frobenius_lift(&space, 2, &h, &v).unwrap();
    let cols: Vec<usize> = space.block_range(2).collect();
    assert_eq!(lift.select_cols(&cols), h);
}

#[test]
fn multi_level_retraction_agrees_with_single_level() {
    let c = Arc::new(build_regular_tree_ball(2, 2, 100).unwrap());
    let g = Arc::new(rooted_tree_automorphism_group(&c, 0, LocalAction::Symmetric, 100).unwrap());
    let action = Arc::new(CellAction::from_vertex_permutations(g.clone(), c).unwrap());
    let total = Arc::new(LinearRep::on_cells(&action, Q, &[1]).unwrap());
    let ext = random_extension(total, 1, 17).unwrap();
    let multi = LevelData {
        action: action.clone(),
        family: LevelFamily::exhaustive_ball_stabilizers(&action, 1, 8).unwrap(),
    };
    assert!(multi.family.num_levels() >= 2);
    let top = multi.family.levels.last().unwrap().clone();
    let single = LevelData {
        action: action.clone(),
        family: LevelFamily::explicit(&action, vec![top]).unwrap(),
    };
    let a = construct_global_retraction(&ext, &multi).unwrap();
    let b = construct_global_retraction(&ext, &single).unwrap();
    assert!(a.passed(), "{:?}", a.transcript);
    assert!(b.passed(), "{:?}", b.transcript);
    // On every piece p_n of the sub representation both retractions undo i.
    let systems: Vec<_> = crate::group::build_level_system(&action, &ext.sub, &multi.family)
        .unwrap()
        .into_iter()
        .map(|s| s.derive_cell_idempotents().unwrap())
        .collect();
    let lm = crate::resolution::LevelMaps::build(systems, action, ext.sub.clone()).unwrap();
    let d = crate::resolution::smooth_product_decomposition(&lm.composites()).unwrap();
    let (ra, rb) = (a.map().unwrap(), b.map().unwrap());
    for p in &d.projectors {
        let on_piece = ext.inclusion.mul(p);
        assert_eq!(ra.mul(&on_piece), *p);
        assert_eq!(rb.mul(&on_piece), *p);
    }
}

#[test]
fn certificate_detects_tampering() {
    let (data, total) = star(Q);
    let ext = random_extension(total, 1, 2).unwrap();
    let mut cert = construct_global_section(&ext, &data).unwrap();
    let mut m = cert.map().unwrap();
    m.set(0, 0, Q.add(m.get(0, 0), &Q.one()));
    cert.map = MatrixRecord::from(m);
    let transcript = cert.verify(&ext).unwrap();
    assert!(!transcript.iter().all(|e| e.holds));
}
