use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::complex::build_regular_tree_ball;
use crate::group::{build_level_system, rooted_tree_automorphism_group, LevelFamily, LocalAction};
use crate::linalg::Scalar;

const Q: FieldSpec = FieldSpec::Rationals;

fn edge() -> Arc<Complex> {
    Arc::new(Complex::simplicial(2, &[vec![0, 1]]).unwrap())
}

fn diag_system() -> IdempotentSystem {
    let vertex = vec![
        Matrix::diag_i64(Q, &[1, 1, 0]),
        Matrix::diag_i64(Q, &[0, 1, 1]),
    ];
    IdempotentSystem::new(edge(), Q, 3, vertex)
        .unwrap()
        .derive_cell_idempotents()
        .unwrap()
}

#[test]
fn single_vertex_population() {
    let c = Arc::new(build_regular_tree_ball(2, 0, 10).unwrap());
    let p = Matrix::diag_i64(Q, &[1, 0]);
    let sys = IdempotentSystem::new(c.clone(), Q, 2, vec![p.clone()])
        .unwrap()
        .derive_cell_idempotents()
        .unwrap();
    assert_eq!(sys.cell_idempotent(0), &p);
    let whole = Subcomplex::whole(&c);
    assert_eq!(sys.support_projection(&whole).unwrap(), p);
    assert!(sys.verify_support_projection(&whole).unwrap().passed());
}

#[test]
fn diagonal_edge() {
    let sys = diag_system();
    assert_eq!(sys.cell_idempotent(2), &Matrix::diag_i64(Q, &[0, 1, 0]));
    let whole = Subcomplex::whole(sys.complex());
    assert!(sys.support_projection(&whole).unwrap().is_identity());
    for cells in [vec![0], vec![1], vec![0, 1, 2]] {
        let s = Subcomplex::new(sys.complex(), cells).unwrap();
        let rec = sys.verify_support_projection(&s).unwrap();
        assert!(rec.passed(), "{rec:?}");
        assert_eq!(rec.convex, Some(true));
    }
    let x = Subcomplex::new(sys.complex(), [0]).unwrap();
    assert_eq!(
        sys.support_projection(&x).unwrap(),
        Matrix::diag_i64(Q, &[1, 1, 0])
    );
}

#[test]
fn equal_idempotents_on_an_edge() {
    let p = Matrix::from_i64_rows(Q, &[vec![1, 1], vec![0, 0]]);
    let sys = IdempotentSystem::new(edge(), Q, 2, vec![p.clone(), p.clone()])
        .unwrap()
        .derive_cell_idempotents()
        .unwrap();
    assert_eq!(
        sys.support_projection(&Subcomplex::whole(sys.complex()))
            .unwrap(),
        p
    );
}

fn random_rank_one_projection(rng: &mut ChaCha8Rng) -> Matrix {
    loop {
        let v: Vec<i64> = (0..2).map(|_| rng.gen_range(-3..=3)).collect();
        let w: Vec<i64> = (0..2).map(|_| rng.gen_range(-3..=3)).collect();
        let dot = v[0] * w[0] + v[1] * w[1];
        if dot == 0 {
            continue;
        }
        let entries = (0..4)
            .map(|k| Scalar::Rat(crate::linalg::Rational::new(v[k / 2] * w[k % 2], dot)))
            .collect();
        return Matrix::from_scalars(Q, 2, 2, entries).unwrap();
    }
}

#[test]
fn non_commuting_pair_is_rejected() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let (a, b) = loop {
        let a = random_rank_one_projection(&mut rng);
        let b = random_rank_one_projection(&mut rng);
        if !a.commutes_with(&b) {
            break (a, b);
        }
    };
    assert!(a.is_idempotent().unwrap() && b.is_idempotent().unwrap());
    let sys = IdempotentSystem::new(edge(), Q, 2, vec![a, b]).unwrap();
    assert!(matches!(
        sys.derive_cell_idempotents(),
        Err(Error::NonCommutingOnCell(2))
    ));
}

#[test]
fn rejects_non_idempotent_and_non_convex() {
    let n = Matrix::from_i64_rows(Q, &[vec![0, 1], vec![0, 0]]);
    assert!(IdempotentSystem::new(edge(), Q, 2, vec![n.clone(), n]).is_err());

    let c = Arc::new(build_regular_tree_ball(2, 1, 10).unwrap());
    let sys = IdempotentSystem::new(c.clone(), Q, 1, vec![Matrix::identity(Q, 1); 4])
        .unwrap()
        .derive_cell_idempotents()
        .unwrap();
    let gap = Subcomplex::new(&c, [1, 2]).unwrap();
    assert!(matches!(
        sys.support_projection(&gap),
        Err(Error::NotConvex)
    ));
    assert_eq!(
        sys.verify_support_projection(&gap).unwrap().convex,
        Some(false)
    );
}

#[test]
fn approximate_unit_examples() {
    let c = Arc::new(build_regular_tree_ball(2, 0, 10).unwrap());
    let lvl =
        |d: &[i64]| IdempotentSystem::new(c.clone(), Q, 2, vec![Matrix::diag_i64(Q, d)]).unwrap();
    let one = Scalar::Rat(crate::linalg::Rational::one());
    let zero = Scalar::Rat(crate::linalg::Rational::zero());
    let exhaustive = vec![lvl(&[1, 0]), lvl(&[1, 1])];
    assert_eq!(
        approximate_unit_check(&exhaustive, 0, &[one.clone(), zero.clone()]),
        Some(0)
    );
    assert_eq!(
        approximate_unit_check(&exhaustive, 0, &[one.clone(), one.clone()]),
        Some(1)
    );
    let stuck = vec![lvl(&[1, 0]), lvl(&[1, 0])];
    assert_eq!(approximate_unit_check(&stuck, 0, &[zero, one]), None);
}

#[test]
fn record_round_trip() {
    let sys = diag_system();
    let json = serde_json::to_string(&sys.record()).unwrap();
    let back: SystemRecord = serde_json::from_str(&json).unwrap();
    let again = IdempotentSystem::from_record(sys.complex().clone(), back).unwrap();
    assert_eq!(again.vertex_idempotent(1), sys.vertex_idempotent(1));
}

#[test]
fn ball_stabilizer_system_on_two_ball() {
    let c = Arc::new(build_regular_tree_ball(2, 2, 100).unwrap());
    let g = Arc::new(rooted_tree_automorphism_group(&c, 0, LocalAction::Symmetric, 100).unwrap());
    let a = CellAction::from_vertex_permutations(g.clone(), c.clone()).unwrap();
    let r = LinearRep::on_cells(&a, Q, &[0, 1]).unwrap();
    let fam = LevelFamily::ball_stabilizers(&a, 1, 1).unwrap();
    let sys = build_level_system(&a, &r, &fam)
        .unwrap()
        .remove(0)
        .derive_cell_idempotents()
        .unwrap();
    assert_eq!(sys.consistency().unwrap().path_condition, Some(true));
    for s in c.enumerate_convex_subcomplexes(400).unwrap() {
        assert!(sys.verify_support_projection(&s).unwrap().passed());
        assert!(sys
            .support_projection_equivariant(&a, &r, &s, g.elements())
            .unwrap());
    }
}
