//! Exact linear algebra over the rationals and prime fields.
//!
//! Everything above this module trusts [`Matrix::rref_with_pivots`] as the single
//! reduction kernel: images, kernels, sums and intersections of subspaces are all
//! phrased through it. No floating point appears anywhere.

mod field;
mod matrix;
mod rational;
mod subspace;

pub use field::{FieldSpec, Scalar, MAX_PRIME};
pub use matrix::{Matrix, MatrixRecord};
pub use rational::{ParseRationalError, Rational};
pub use subspace::Subspace;

/// Column-stacked basis of a subspace, i.e. the inclusion map into the ambient space.
pub fn inclusion_matrix(s: &Subspace) -> Matrix {
    s.basis().transpose()
}
