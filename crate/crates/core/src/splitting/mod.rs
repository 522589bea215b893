//! Equivariant splittings of short exact sequences `W′ ↣ W ↠ W″` of
//! representations: local sections by averaging over a subgroup, and global
//! sections and retractions assembled through the block spaces of
//! [`crate::resolution`].

mod certificate;
mod global;

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::group::{intertwines, inverse_order, FiniteGroup, LinearRep, Subgroup};
use crate::hashing::short_hash;
use crate::linalg::{FieldSpec, Matrix, MatrixRecord, Scalar, Subspace};

pub use certificate::{
    CertificateKind, EquivarianceScope, InputHashes, SplittingCertificate, TranscriptEntry,
};
pub use global::{
    construct_global_retraction, construct_global_section, frobenius_lift, LevelData,
};

/// `0 → W′ → W → W″ → 0` with equivariant `i: W′ → W` and `p: W → W″`.
#[derive(Debug, Clone)]
pub struct Extension {
    pub sub: Arc<LinearRep>,
    pub total: Arc<LinearRep>,
    pub quotient: Arc<LinearRep>,
    pub inclusion: Matrix,
    pub projection: Matrix,
}

impl Extension {
    /// Checks exactness and equivariance (on generators, which suffices
    /// because the representations are homomorphisms).
    pub fn new(
        sub: Arc<LinearRep>,
        total: Arc<LinearRep>,
        quotient: Arc<LinearRep>,
        inclusion: Matrix,
        projection: Matrix,
    ) -> Result<Self> {
        let bad = |why: &str| Err(Error::InvalidExtension(why.into()));
        let group = total.group();
        if !Arc::ptr_eq(sub.group(), group) || !Arc::ptr_eq(quotient.group(), group) {
            return bad("representations of different groups");
        }
        let field = total.field();
        if sub.field() != field || quotient.field() != field {
            return bad("representations over different fields");
        }
        let (d1, d, d2) = (sub.dim(), total.dim(), quotient.dim());
        if (inclusion.rows(), inclusion.cols()) != (d, d1)
            || (projection.rows(), projection.cols()) != (d2, d)
        {
            return bad("maps have the wrong shapes");
        }
        if inclusion.rank() != d1 {
            return bad("inclusion is not injective");
        }
        if projection.rank() != d2 {
            return bad("projection is not surjective");
        }
        if d1 + d2 != d {
            return bad("dimensions do not add up");
        }
        if !projection.mul(&inclusion).is_zero() {
            return bad("projection does not kill the image of the inclusion");
        }
        let gens = group.generators().to_vec();
        if !intertwines(&inclusion, &sub, &total, gens.iter().copied()) {
            return bad("inclusion is not equivariant");
        }
        if !intertwines(&projection, &total, &quotient, gens) {
            return bad("projection is not equivariant");
        }
        Ok(Extension {
            sub,
            total,
            quotient,
            inclusion,
            projection,
        })
    }

    /// Extension given by a `G`-stable subspace of `W`: `W′` is the subspace,
    /// `W″` the quotient in the coordinates off the pivots of the subspace.
    pub fn from_invariant_subspace(total: Arc<LinearRep>, s: &Subspace) -> Result<Self> {
        let field = total.field();
        let d = total.dim();
        let b = crate::linalg::inclusion_matrix(s);
        let pivots = s.pivots().to_vec();
        let free: Vec<usize> = (0..d).filter(|j| !pivots.contains(j)).collect();
        let id = Matrix::identity(field, d);
        let coords = id.select_rows(&pivots);
        let projection = id.sub(&b.mul(&coords)).select_rows(&free);
        let lift = id.select_cols(&free);
        let group = total.group().clone();
        let mut sub_rho = Vec::with_capacity(group.order());
        let mut quo_rho = Vec::with_capacity(group.order());
        for g in group.elements() {
            let r = total.rho(g);
            let moved = r.mul(&b);
            if !Subspace::from_rows(&moved.transpose()).is_subspace_of(s)? {
                return Err(Error::InvalidExtension("subspace is not invariant".into()));
            }
            sub_rho.push(coords.mul(&moved));
            quo_rho.push(projection.mul(r).mul(&lift));
        }
        let sub = Arc::new(LinearRep::from_matrices(group.clone(), field, sub_rho)?);
        let quotient = Arc::new(LinearRep::from_matrices(group, field, quo_rho)?);
        Extension::new(sub, total, quotient, b, projection)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        self.total.group()
    }

    pub fn field(&self) -> FieldSpec {
        self.total.field()
    }

    pub fn hashes(&self) -> InputHashes {
        InputHashes {
            sub: self.sub.hash(),
            total: self.total.hash(),
            quotient: self.quotient.hash(),
            inclusion: short_hash(&MatrixRecord::from(self.inclusion.clone())),
            projection: short_hash(&MatrixRecord::from(self.projection.clone())),
        }
    }

    /// `t` with `p t = Id`, supported on the pivot columns of `p`.
    pub fn canonical_section(&self) -> Matrix {
        let (_, pivots) = self.projection.rref_with_pivots();
        let p_j = self.projection.select_cols(&pivots);
        let inv = p_j
            .inverse()
            .expect("pivot columns of a surjection are invertible");
        let d = self.total.dim();
        let mut t = Matrix::zeros(self.field(), d, self.quotient.dim());
        for (k, &j) in pivots.iter().enumerate() {
            for c in 0..inv.cols() {
                t.set(j, c, inv.get(k, c).clone());
            }
        }
        t
    }

    /// `t′` with `t′ i = Id`, reading off the pivot rows of `i`.
    pub fn canonical_retraction(&self) -> Matrix {
        let (_, pivots) = self.inclusion.transpose().rref_with_pivots();
        let i_j = self.inclusion.select_rows(&pivots);
        let inv = i_j
            .inverse()
            .expect("pivot rows of an injection are invertible");
        let d = self.total.dim();
        let mut t = Matrix::zeros(self.field(), self.sub.dim(), d);
        for (k, &j) in pivots.iter().enumerate() {
            for r in 0..inv.rows() {
                t.set(r, j, inv.get(r, k).clone());
            }
        }
        t
    }
}

fn check_order(k: &Subgroup, rep: &LinearRep, context: &str) -> Result<Scalar> {
    inverse_order(k, rep).ok_or_else(|| {
        Error::bad_characteristic(rep.field().characteristic(), context, k.elements())
    })
}

/// `s_K = |K|⁻¹ Σ_k ρ_W(k) t ρ_{W″}(k)⁻¹` for the canonical section `t`.
pub fn local_equivariant_section(ext: &Extension, k: &Subgroup) -> Result<Matrix> {
    local_section_in(ext, k, "local section")
}

pub(crate) fn local_section_in(ext: &Extension, k: &Subgroup, context: &str) -> Result<Matrix> {
    let inv = check_order(k, &ext.total, context)?;
    let t = ext.canonical_section();
    let g = ext.group();
    let mut acc = Matrix::zeros(ext.field(), t.rows(), t.cols());
    for &e in k.elements() {
        acc.add_assign(&ext.total.rho(e).mul(&t).mul(ext.quotient.rho(g.inv(e))));
    }
    Ok(acc.scale(&inv))
}

/// `r_K = |K|⁻¹ Σ_k ρ_{W′}(k) t′ ρ_W(k)⁻¹` for the canonical retraction `t′`.
pub fn local_equivariant_retraction(ext: &Extension, k: &Subgroup) -> Result<Matrix> {
    local_retraction_in(ext, k, "local retraction")
}

pub(crate) fn local_retraction_in(ext: &Extension, k: &Subgroup, context: &str) -> Result<Matrix> {
    let inv = check_order(k, &ext.total, context)?;
    let t = ext.canonical_retraction();
    let g = ext.group();
    let mut acc = Matrix::zeros(ext.field(), t.rows(), t.cols());
    for &e in k.elements() {
        acc.add_assign(&ext.sub.rho(e).mul(&t).mul(ext.total.rho(g.inv(e))));
    }
    Ok(acc.scale(&inv))
}

/// Random extension of `total`. `W′` is the `G`-span of `spanning` random
/// vectors with entries in `-2..=2`, cut down by the kernel of the invariant
/// functional `Σ_g f∘ρ(g)` for a random `f` whenever that functional is
/// nonzero. Draws are repeated a bounded number of times until `W′` is a
/// proper nonzero subspace; if none is found the last draw is returned.
pub fn random_extension(total: Arc<LinearRep>, spanning: usize, seed: u64) -> Result<Extension> {
    const ATTEMPTS: usize = 32;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let field = total.field();
    let d = total.dim();
    let random_vector = |rng: &mut ChaCha8Rng| -> Vec<Scalar> {
        (0..d)
            .map(|_| field.from_i64(rng.gen_range(-2..=2)))
            .collect()
    };
    for attempt in 1.. {
        let mut vectors = Vec::new();
        for _ in 0..spanning {
            let col = Matrix::column(field, random_vector(&mut rng));
            for g in total.group().elements() {
                let moved = total.rho(g).mul(&col);
                vectors.push((0..d).map(|i| moved.get(i, 0).clone()).collect::<Vec<_>>());
            }
        }
        let mut s = Subspace::from_vectors(field, d, &vectors)?;
        let f = Matrix::column(field, random_vector(&mut rng)).transpose();
        let mut functional = Matrix::zeros(field, 1, d);
        for g in total.group().elements() {
            functional.add_assign(&f.mul(total.rho(g)));
        }
        if !functional.is_zero() {
            s = s.intersect(&functional.kernel())?;
        }
        if (s.dim() > 0 && s.dim() < d) || attempt == ATTEMPTS {
            return Extension::from_invariant_subspace(total, &s);
        }
    }
    unreachable!()
}

/// Random change of basis `L U` with unit-diagonal triangular factors and
/// entries in `-1..=1`.
pub fn random_unimodular(field: FieldSpec, n: usize, seed: u64) -> Matrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut lower = Matrix::identity(field, n);
    let mut upper = Matrix::identity(field, n);
    for i in 0..n {
        for j in 0..i {
            lower.set(i, j, field.from_i64(rng.gen_range(-1..=1)));
            upper.set(j, i, field.from_i64(rng.gen_range(-1..=1)));
        }
    }
    lower.mul(&upper)
}

#[cfg(test)]
mod tests;
