use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{CellAction, LinearRep, Subgroup};
use crate::complex::CellId;
use crate::error::{Error, Result};
use crate::idempotents::IdempotentSystem;
use crate::linalg::{Matrix, Scalar};

/// `av(U) = |U|⁻¹ Σ_{u ∈ U} ρ(u)`.
pub fn averaging_idempotent(u: &Subgroup, rep: &LinearRep) -> Result<Matrix> {
    averaging_idempotent_in(u, rep, "averaging over a subgroup")
}

pub(crate) fn averaging_idempotent_in(
    u: &Subgroup,
    rep: &LinearRep,
    context: &str,
) -> Result<Matrix> {
    let field = rep.field();
    let inv = field
        .inv(&field.from_i64(u.order() as i64))
        .ok_or_else(|| Error::bad_characteristic(field.characteristic(), context, u.elements()))?;
    let mut sum = Matrix::zeros(field, rep.dim(), rep.dim());
    for &g in u.elements() {
        sum.add_assign(rep.rho(g));
    }
    Ok(sum.scale(&inv))
}

/// The scalar `|U|⁻¹` when it exists.
pub fn inverse_order(u: &Subgroup, rep: &LinearRep) -> Option<Scalar> {
    let field = rep.field();
    field.inv(&field.from_i64(u.order() as i64))
}

/// Subgroups `U[n][x]` for levels `n = 0..N` and vertices `x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelFamily {
    /// Radius offset when built from ball stabilizers.
    pub base_radius: Option<usize>,
    pub levels: Vec<Vec<Subgroup>>,
}

impl LevelFamily {
    /// `U[n][x]` = pointwise stabilizer of the ball of radius `base_radius + n` around `x`.
    pub fn ball_stabilizers(
        action: &CellAction,
        base_radius: usize,
        num_levels: usize,
    ) -> Result<Self> {
        let nv = action.complex().num_vertices();
        let levels = (0..num_levels)
            .map(|n| {
                (0..nv)
                    .map(|x| action.pointwise_ball_stabilizer(x, base_radius + n))
                    .collect()
            })
            .collect::<Result<Vec<Vec<Subgroup>>>>()?;
        Ok(LevelFamily {
            base_radius: Some(base_radius),
            levels,
        })
    }

    /// Ball-stabilizer levels continued until every subgroup is trivial, if that happens
    /// within `max_levels`.
    pub fn exhaustive_ball_stabilizers(
        action: &CellAction,
        base_radius: usize,
        max_levels: usize,
    ) -> Result<Self> {
        let nv = action.complex().num_vertices();
        let mut levels = Vec::new();
        for n in 0..max_levels {
            let level: Vec<Subgroup> = (0..nv)
                .map(|x| action.pointwise_ball_stabilizer(x, base_radius + n))
                .collect::<Result<_>>()?;
            let done = level.iter().all(Subgroup::is_trivial);
            levels.push(level);
            if done {
                return Ok(LevelFamily {
                    base_radius: Some(base_radius),
                    levels,
                });
            }
        }
        Err(Error::NotExhaustive)
    }

    /// A user-supplied family, accepted only if it passes [`LevelFamily::validate`].
    pub fn explicit(action: &CellAction, levels: Vec<Vec<Subgroup>>) -> Result<Self> {
        let fam = LevelFamily {
            base_radius: None,
            levels,
        };
        fam.validate(action)?;
        Ok(fam)
    }

    pub fn num_levels(&self) -> usize {
        self.levels.len()
    }

    pub fn subgroup(&self, n: usize, x: CellId) -> &Subgroup {
        &self.levels[n][x]
    }

    /// Whether the top level consists of trivial subgroups.
    pub fn is_exhaustive(&self) -> bool {
        self.levels
            .last()
            .is_some_and(|l| l.iter().all(Subgroup::is_trivial))
    }

    /// Shape, nesting `U[n+1][x] ⊆ U[n][x]` and equivariance `g U[n][x] g⁻¹ = U[n][g·x]`.
    pub fn validate(&self, action: &CellAction) -> Result<()> {
        let g = action.group();
        let nv = action.complex().num_vertices();
        if self.levels.is_empty() {
            return Err(Error::InvalidLevelFamily("no levels".into()));
        }
        for (n, level) in self.levels.iter().enumerate() {
            if level.len() != nv {
                return Err(Error::InvalidLevelFamily(format!(
                    "level {n} has {} entries for {nv} vertices",
                    level.len()
                )));
            }
            for (x, u) in level.iter().enumerate() {
                Subgroup::from_elements(g, u.elements().iter().copied())
                    .map_err(|e| Error::InvalidLevelFamily(format!("U[{n}][{x}]: {e}")))?;
                if n > 0 && !u.is_subgroup_of(&self.levels[n - 1][x]) {
                    return Err(Error::InvalidLevelFamily(format!(
                        "U[{n}][{x}] is not inside U[{}][{x}]",
                        n - 1
                    )));
                }
                for &s in g.generators() {
                    if u.conjugate(g, s) != level[action.act(s, x)] {
                        return Err(Error::InvalidLevelFamily(format!(
                            "U[{n}][{x}] conjugated by {s} is not U[{n}][{}]",
                            action.act(s, x)
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Vertex idempotents `e[n][x] = av(U[n][x])`, one system per level, with
/// conjugation-equivariance `ρ(g) e[n][x] ρ(g)⁻¹ = e[n][g·x]` checked on generators.
pub fn build_level_system(
    action: &CellAction,
    rep: &LinearRep,
    fam: &LevelFamily,
) -> Result<Vec<IdempotentSystem>> {
    let g = action.group();
    let mut cache: HashMap<&Subgroup, Matrix> = HashMap::new();
    let mut systems = Vec::with_capacity(fam.levels.len());
    for (n, level) in fam.levels.iter().enumerate() {
        let mut vertex = Vec::with_capacity(level.len());
        for (x, u) in level.iter().enumerate() {
            if !cache.contains_key(u) {
                let e = averaging_idempotent_in(u, rep, &format!("level {n}, vertex {x}"))?;
                cache.insert(u, e);
            }
            vertex.push(cache[u].clone());
        }
        for &s in g.generators() {
            let (r, r_inv) = (rep.rho(s), rep.rho(g.inv(s)));
            for (x, e) in vertex.iter().enumerate() {
                if r.mul(e).mul(r_inv) != vertex[action.act(s, x)] {
                    return Err(Error::InconsistentSystem(format!(
                        "level {n}: e[{x}] is not equivariant under {s}"
                    )));
                }
            }
        }
        systems.push(IdempotentSystem::new(
            action.complex().clone(),
            rep.field(),
            rep.dim(),
            vertex,
        )?);
    }
    Ok(systems)
}

/// For each cell of positive dimension, whether the subgroup generated by its
/// vertex subgroups at level `n` averages to the product of the vertex idempotents.
pub fn cell_subgroup_realization(
    action: &CellAction,
    rep: &LinearRep,
    fam: &LevelFamily,
    n: usize,
) -> Result<Vec<(CellId, bool)>> {
    let c = action.complex();
    let g = action.group();
    let mut out = Vec::new();
    for sigma in c.num_vertices()..c.num_cells() {
        let mut gens = Vec::new();
        let mut product = Matrix::identity(rep.field(), rep.dim());
        for &x in c.vertices_of(sigma) {
            gens.extend_from_slice(fam.levels[n][x].elements());
            product = product.mul(&averaging_idempotent(&fam.levels[n][x], rep)?);
        }
        let joined = Subgroup::generated_by(g, &gens);
        let realized = match averaging_idempotent(&joined, rep) {
            Ok(e) => e == product,
            Err(Error::BadCharacteristic { .. }) => false,
            Err(e) => return Err(e),
        };
        out.push((sigma, realized));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::complex::build_regular_tree_ball;
    use crate::group::finite::tests::s3;
    use crate::group::{all_subgroups, rooted_tree_automorphism_group, LocalAction};
    use crate::linalg::FieldSpec;

    #[test]
    fn trivial_subgroup_averages_to_identity() {
        let g = Arc::new(s3());
        let r = LinearRep::regular(g, FieldSpec::Rationals);
        assert!(averaging_idempotent(&Subgroup::trivial(), &r)
            .unwrap()
            .is_identity());
    }

    #[test]
    fn alternating_subgroup_in_regular_rep() {
        let g = Arc::new(s3());
        let a3 = all_subgroups(&g, 100)
            .unwrap()
            .into_iter()
            .find(|s| s.order() == 3)
            .unwrap();
        let r = LinearRep::regular(g.clone(), FieldSpec::Rationals);
        let av = averaging_idempotent(&a3, &r).unwrap();
        assert!(av.is_idempotent().unwrap());
        assert_eq!(av.rank(), 2);
        let r3 = LinearRep::regular(g, FieldSpec::prime(3).unwrap());
        assert!(matches!(
            averaging_idempotent(&a3, &r3),
            Err(Error::BadCharacteristic {
                characteristic: 3,
                ..
            })
        ));
    }

    fn star_action() -> CellAction {
        let c = Arc::new(build_regular_tree_ball(2, 1, 100).unwrap());
        let g =
            Arc::new(rooted_tree_automorphism_group(&c, 0, LocalAction::Symmetric, 100).unwrap());
        CellAction::from_vertex_permutations(g, c).unwrap()
    }

    #[test]
    fn leaf_stabilizer_level() {
        let a = star_action();
        let r = LinearRep::regular(a.group().clone(), FieldSpec::Rationals);
        let fam = LevelFamily::ball_stabilizers(&a, 0, 3).unwrap();
        fam.validate(&a).unwrap();
        assert!(fam.is_exhaustive());
        let sys = build_level_system(&a, &r, &fam).unwrap();
        assert_eq!(sys[0].vertex_idempotent(1).rank(), 3);
        assert_eq!(sys[0].vertex_idempotent(0).rank(), 1);
        assert_eq!(sys[1].vertex_idempotent(2).rank(), 3);
        assert!(sys[2].vertex_idempotent(2).is_identity());
    }

    #[test]
    fn trivial_family_and_trivial_rep() {
        let a = star_action();
        let triv = LevelFamily::explicit(&a, vec![vec![Subgroup::trivial(); 4]]).unwrap();
        let r = LinearRep::regular(a.group().clone(), FieldSpec::Rationals);
        let sys = build_level_system(&a, &r, &triv).unwrap();
        assert!((0..4).all(|x| sys[0].vertex_idempotent(x).is_identity()));

        let t = LinearRep::trivial(a.group().clone(), FieldSpec::Rationals);
        let fam = LevelFamily::ball_stabilizers(&a, 0, 2).unwrap();
        let sys = build_level_system(&a, &t, &fam).unwrap();
        assert!(sys
            .iter()
            .all(|s| (0..4).all(|x| s.vertex_idempotent(x).is_identity())));
    }

    #[test]
    fn rejects_non_equivariant_family() {
        let a = star_action();
        let stab1 = a.stabilizer(1);
        let mut level = vec![Subgroup::trivial(); 4];
        level[1] = stab1;
        assert!(LevelFamily::explicit(&a, vec![level]).is_err());
    }

    #[test]
    fn nested_levels_form_approximate_unit() {
        let c = Arc::new(build_regular_tree_ball(2, 2, 100).unwrap());
        let g =
            Arc::new(rooted_tree_automorphism_group(&c, 0, LocalAction::Symmetric, 100).unwrap());
        let a = CellAction::from_vertex_permutations(g.clone(), c).unwrap();
        let r = LinearRep::on_cells(&a, FieldSpec::Rationals, &[0]).unwrap();
        let fam = LevelFamily::exhaustive_ball_stabilizers(&a, 1, 10).unwrap();
        assert_eq!(fam.num_levels(), 4);
        let sys = build_level_system(&a, &r, &fam).unwrap();
        for n in 0..sys.len() - 1 {
            for x in 0..10 {
                let (lo, hi) = (sys[n].vertex_idempotent(x), sys[n + 1].vertex_idempotent(x));
                assert_eq!(&hi.mul(lo), lo);
                assert_eq!(&lo.mul(hi), lo);
            }
        }
    }
}
