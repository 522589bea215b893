use serde::{Deserialize, Serialize};

use super::field::{FieldSpec, Scalar};
use super::matrix::Matrix;
use crate::error::{Error, Result};

/// A linear subspace stored by its canonical reduced row-echelon basis.
///
/// Two equal subspaces have identical stored bases, so `==` is subspace equality.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    ambient_dim: usize,
    basis: Matrix,
    pivots: Vec<usize>,
}

impl Subspace {
    /// Row space of `spanning`.
    pub fn from_rows(spanning: &Matrix) -> Self {
        let (r, pivots) = spanning.rref_with_pivots();
        let basis = r.block(0, 0, pivots.len(), spanning.cols());
        Subspace {
            ambient_dim: spanning.cols(),
            basis,
            pivots,
        }
    }

    pub fn from_vectors(
        field: FieldSpec,
        ambient_dim: usize,
        vectors: &[Vec<Scalar>],
    ) -> Result<Self> {
        let data: Vec<Scalar> = vectors.iter().flatten().cloned().collect();
        if vectors.iter().any(|v| v.len() != ambient_dim) {
            return Err(Error::DimensionMismatch(
                "vector length differs from ambient dimension".into(),
            ));
        }
        Ok(Self::from_rows(&Matrix::from_scalars(
            field,
            vectors.len(),
            ambient_dim,
            data,
        )?))
    }

    pub fn zero(field: FieldSpec, ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Matrix::zeros(field, 0, ambient_dim),
            pivots: vec![],
        }
    }

    pub fn full(field: FieldSpec, ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: Matrix::identity(field, ambient_dim),
            pivots: (0..ambient_dim).collect(),
        }
    }

    pub fn field(&self) -> FieldSpec {
        self.basis.field()
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    /// Basis as rows, in reduced row-echelon form.
    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim != other.ambient_dim {
            return Err(Error::AmbientMismatch(self.ambient_dim, other.ambient_dim));
        }
        Ok(())
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        Ok(Subspace::from_rows(&self.basis.vstack(&other.basis)?))
    }

    /// Intersection via the kernel of `[A^T | -B^T]`.
    pub fn intersect(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let f = self.field();
        let (a, b) = (self.dim(), other.dim());
        if a == 0 || b == 0 {
            return Ok(Subspace::zero(f, self.ambient_dim));
        }
        let stacked = self
            .basis
            .transpose()
            .hstack(&other.basis.transpose().neg())?;
        let relations = stacked.kernel();
        // (lambda, mu) with lambda^T A = mu^T B; keep the lambda part.
        let lambdas = relations.basis.block(0, 0, relations.dim(), a);
        Ok(Subspace::from_rows(&lambdas.mul(&self.basis)))
    }

    pub fn contains_vector(&self, v: &[Scalar]) -> bool {
        if v.len() != self.ambient_dim {
            return false;
        }
        // Reduce v against the RREF basis.
        let f = self.field();
        let mut w = v.to_vec();
        for (row, &p) in self.pivots.iter().enumerate() {
            if w[p].is_zero() {
                continue;
            }
            let c = f.neg(&w[p]);
            for (j, b) in self.basis.row(row).iter().enumerate() {
                if !b.is_zero() {
                    f.add_mul_assign(&mut w[j], &c, b);
                }
            }
        }
        w.iter().all(Scalar::is_zero)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> Result<bool> {
        self.check_ambient(other)?;
        Ok((0..self.dim()).all(|i| other.contains_vector(self.basis.row(i))))
    }

    /// Coordinates of `v` in the canonical basis; only valid for `v` in the subspace.
    pub fn coordinates(&self, v: &[Scalar]) -> Vec<Scalar> {
        self.pivots.iter().map(|&p| v[p].clone()).collect()
    }
}
