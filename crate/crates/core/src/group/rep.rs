use std::collections::VecDeque;
use std::sync::Arc;

use super::{CellAction, FiniteGroup, Subgroup};
use crate::error::{Error, Result};
use crate::hashing::short_hash;
use crate::linalg::{FieldSpec, Matrix, MatrixRecord, Subspace};

/// A matrix representation `g ↦ ρ(g)` of a finite group, stored for every element.
#[derive(Debug, Clone)]
pub struct LinearRep {
    group: Arc<FiniteGroup>,
    field: FieldSpec,
    dim: usize,
    rho: Vec<Matrix>,
}

impl LinearRep {
    /// Checks shapes, `ρ(1) = I` and `ρ(s h) = ρ(s) ρ(h)` for generators `s`
    /// and all `h`, which forces multiplicativity everywhere.
    pub fn from_matrices(
        group: Arc<FiniteGroup>,
        field: FieldSpec,
        rho: Vec<Matrix>,
    ) -> Result<Self> {
        if rho.len() != group.order() {
            return Err(Error::InvalidRepresentation(format!(
                "{} matrices for a group of order {}",
                rho.len(),
                group.order()
            )));
        }
        let dim = rho[0].rows();
        for (g, m) in rho.iter().enumerate() {
            if m.rows() != dim || m.cols() != dim || m.field() != field {
                return Err(Error::InvalidRepresentation(format!(
                    "matrix for element {g} has the wrong shape"
                )));
            }
        }
        if !rho[0].is_identity() {
            return Err(Error::InvalidRepresentation(
                "identity is not sent to the identity matrix".into(),
            ));
        }
        for &s in group.generators() {
            for h in group.elements() {
                if rho[group.mul(s, h)] != rho[s].mul(&rho[h]) {
                    return Err(Error::InvalidRepresentation(format!(
                        "not multiplicative at ({s}, {h})"
                    )));
                }
            }
        }
        Ok(LinearRep {
            group,
            field,
            dim,
            rho,
        })
    }

    /// Extends matrices given on generating elements to the whole group by
    /// word evaluation; every relation met along the way is checked.
    pub fn from_generator_matrices(
        group: Arc<FiniteGroup>,
        field: FieldSpec,
        dim: usize,
        gens: &[(usize, Matrix)],
    ) -> Result<Self> {
        for (g, m) in gens {
            if *g >= group.order() || m.rows() != dim || m.cols() != dim || m.field() != field {
                return Err(Error::InvalidRepresentation(format!(
                    "generator matrix for {g} is malformed"
                )));
            }
        }
        let mut rho: Vec<Option<Matrix>> = vec![None; group.order()];
        rho[0] = Some(Matrix::identity(field, dim));
        let mut queue = VecDeque::from([0usize]);
        while let Some(h) = queue.pop_front() {
            let rh = rho[h].clone().expect("visited");
            for (s, m) in gens {
                let p = group.mul(*s, h);
                let value = m.mul(&rh);
                match &rho[p] {
                    Some(existing) if *existing != value => {
                        return Err(Error::InvalidRepresentation(format!(
                            "inconsistent generator matrices: two words for element {p} disagree"
                        )));
                    }
                    Some(_) => {}
                    None => {
                        rho[p] = Some(value);
                        queue.push_back(p);
                    }
                }
            }
        }
        let rho = rho.into_iter().collect::<Option<Vec<_>>>().ok_or_else(|| {
            Error::InvalidRepresentation("generator elements do not generate the group".into())
        })?;
        Self::from_matrices(group, field, rho)
    }

    pub fn trivial(group: Arc<FiniteGroup>, field: FieldSpec) -> Self {
        let rho = vec![Matrix::identity(field, 1); group.order()];
        LinearRep {
            group,
            field,
            dim: 1,
            rho,
        }
    }

    /// Permutation representation from `perm(g)[i] = g·i` on `degree` points.
    pub fn from_permutations(
        group: Arc<FiniteGroup>,
        field: FieldSpec,
        degree: usize,
        perm: impl Fn(usize) -> Vec<usize>,
    ) -> Result<Self> {
        let rho = group
            .elements()
            .map(|g| Matrix::permutation(field, &perm(g)))
            .collect::<Vec<_>>();
        if rho.iter().any(|m| m.rows() != degree) {
            return Err(Error::InvalidRepresentation(
                "permutation of the wrong degree".into(),
            ));
        }
        Self::from_matrices(group, field, rho)
    }

    /// `ρ(g) e_h = e_{gh}`.
    pub fn regular(group: Arc<FiniteGroup>, field: FieldSpec) -> Self {
        let n = group.order();
        let g2 = group.clone();
        Self::from_permutations(group, field, n, |g| (0..n).map(|h| g2.mul(g, h)).collect())
            .expect("the regular representation is valid")
    }

    /// Permutation representation on the cells whose dimension is listed in
    /// `dims`, basis ordered by cell id.
    pub fn on_cells(action: &CellAction, field: FieldSpec, dims: &[usize]) -> Result<Self> {
        let c = action.complex();
        let cells: Vec<usize> = (0..c.num_cells())
            .filter(|&x| dims.contains(&c.dim_of(x)))
            .collect();
        let mut pos = vec![usize::MAX; c.num_cells()];
        for (i, &x) in cells.iter().enumerate() {
            pos[x] = i;
        }
        Self::from_permutations(action.group().clone(), field, cells.len(), |g| {
            cells.iter().map(|&x| pos[action.act(g, x)]).collect()
        })
    }

    pub fn direct_sum(parts: &[&LinearRep]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidRepresentation("empty direct sum".into()))?;
        if parts
            .iter()
            .any(|r| !Arc::ptr_eq(&r.group, &first.group) || r.field != first.field)
        {
            return Err(Error::InvalidRepresentation(
                "summands over different groups or fields".into(),
            ));
        }
        let dim: usize = parts.iter().map(|r| r.dim).sum();
        let rho = first
            .group
            .elements()
            .map(|g| {
                let mut m = Matrix::zeros(first.field, dim, dim);
                let mut at = 0;
                for r in parts {
                    m.set_block(at, at, &r.rho[g]);
                    at += r.dim;
                }
                m
            })
            .collect();
        Ok(LinearRep {
            group: first.group.clone(),
            field: first.field,
            dim,
            rho,
        })
    }

    /// `g ↦ P ρ(g) P⁻¹`.
    pub fn conjugated(&self, p: &Matrix) -> Result<Self> {
        let p_inv = p.inverse()?;
        if p.rows() != self.dim {
            return Err(Error::DimensionMismatch(
                "change of basis has the wrong size".into(),
            ));
        }
        let rho = self.rho.iter().map(|m| p.mul(m).mul(&p_inv)).collect();
        Ok(LinearRep {
            group: self.group.clone(),
            field: self.field,
            dim: self.dim,
            rho,
        })
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rho(&self, g: usize) -> &Matrix {
        &self.rho[g]
    }

    /// Short hash of the generator matrices.
    pub fn hash(&self) -> String {
        let gens: Vec<(usize, MatrixRecord)> = self
            .group
            .generators()
            .iter()
            .map(|&g| (g, MatrixRecord::from(self.rho[g].clone())))
            .collect();
        short_hash(&(self.field, self.dim, gens))
    }

    /// Vectors fixed by every element of `u`: the kernel of all `ρ(u) − I` stacked.
    pub fn fixed_subspace(&self, u: &Subgroup) -> Subspace {
        let id = Matrix::identity(self.field, self.dim);
        let blocks: Vec<Matrix> = u.elements().iter().map(|&g| self.rho[g].sub(&id)).collect();
        let refs: Vec<&Matrix> = blocks.iter().collect();
        Matrix::vstack_all(self.field, self.dim, &refs)
            .expect("equal widths")
            .kernel()
    }
}

/// Whether `to.ρ(g) · m = m · from.ρ(g)` for every listed `g`.
pub fn intertwines(
    m: &Matrix,
    from: &LinearRep,
    to: &LinearRep,
    elements: impl IntoIterator<Item = usize>,
) -> bool {
    elements
        .into_iter()
        .all(|g| to.rho(g).mul(m) == m.mul(from.rho(g)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::finite::tests::s3;

    #[test]
    fn regular_rep_is_valid() {
        let g = Arc::new(s3());
        let r = LinearRep::regular(g.clone(), FieldSpec::Rationals);
        assert_eq!(r.dim(), 6);
        let whole = Subgroup::whole(&g);
        assert_eq!(r.fixed_subspace(&whole).dim(), 1);
    }

    #[test]
    fn generator_extension_matches_regular() {
        let g = Arc::new(s3());
        let reg = LinearRep::regular(g.clone(), FieldSpec::Rationals);
        let gens: Vec<(usize, Matrix)> = g
            .generators()
            .iter()
            .map(|&s| (s, reg.rho(s).clone()))
            .collect();
        let ext =
            LinearRep::from_generator_matrices(g.clone(), FieldSpec::Rationals, 6, &gens).unwrap();
        for e in g.elements() {
            assert_eq!(ext.rho(e), reg.rho(e));
        }
        // A sign on one generator only, applied to a transposition and a 3-cycle, breaks relations.
        let mut bad = gens.clone();
        let three_cycle = g
            .elements()
            .find(|&e| g.mul(e, g.mul(e, e)) == 0 && e != 0)
            .unwrap();
        bad.push((three_cycle, reg.rho(three_cycle).neg()));
        assert!(LinearRep::from_generator_matrices(g, FieldSpec::Rationals, 6, &bad).is_err());
    }

    #[test]
    fn direct_sum_and_conjugation() {
        let g = Arc::new(s3());
        let f = FieldSpec::prime(7).unwrap();
        let a = LinearRep::regular(g.clone(), f);
        let b = LinearRep::trivial(g.clone(), f);
        let s = LinearRep::direct_sum(&[&a, &b]).unwrap();
        assert_eq!(s.dim(), 7);
        let p = Matrix::from_i64_rows(
            f,
            &(0..7)
                .map(|i| (0..7).map(|j| i64::from(j >= i)).collect())
                .collect::<Vec<_>>(),
        );
        let c = s.conjugated(&p).unwrap();
        LinearRep::from_matrices(
            g.clone(),
            f,
            g.elements().map(|e| c.rho(e).clone()).collect(),
        )
        .unwrap();
        assert!(intertwines(&p, &s, &c, g.elements()));
    }
}
