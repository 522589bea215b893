//! Block spaces `F = ⊕_σ e_σ V` over the cells of a complex, the maps
//! `α: V → F` and `π: F → V`, their multi-level telescoping version, and the
//! averaged sums `π̄_U`.
//!
//! A block function is stored as one flat coordinate vector: cells in id order,
//! each block in the coordinates of the canonical basis of `im(e_σ)`. Because
//! the complex is finite, every block function has finite support, so the
//! spaces of all, smooth and finitely supported block functions coincide here.

mod levels;

use std::collections::HashMap;
use std::ops::Range;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::complex::CellId;
use crate::error::{Error, Result};
use crate::group::{averaging_idempotent, CellAction, LinearRep, Subgroup};
use crate::idempotents::IdempotentSystem;
use crate::linalg::{inclusion_matrix, FieldSpec, Matrix, Scalar};

pub use levels::{
    multi_level_alpha, smooth_product_decomposition, Decomposition, DecompositionRecord, LevelMap,
    LevelMaps, MultiLevel,
};

/// Cuspidality in the finite model: every representation has finitely
/// supported matrix coefficients, so the predicate holds for all inputs.
/// Returned with the annotation reports carry.
pub fn uniformly_cuspidal(_rep: &LinearRep) -> (bool, &'static str) {
    (
        true,
        "holds vacuously: the group is finite, so every coefficient has finite support",
    )
}

/// `F = ⊕_σ e_σ V` with the action `(gψ)(σ) = ρ(g) ψ(g⁻¹σ)`.
#[derive(Debug, Clone)]
pub struct BlockSpace {
    sys: IdempotentSystem,
    action: Arc<CellAction>,
    rep: Arc<LinearRep>,
    /// Columns span `im(e_σ)`, in canonical order.
    bases: Vec<Matrix>,
    /// Pivot coordinates: `ψ_σ = v[pivots]` for `v ∈ im(e_σ)`.
    pivots: Vec<Vec<usize>>,
    offsets: Vec<usize>,
}

/// Outcome of the checks on `q = π α` for one level.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlphaPiRecord {
    pub dim_f: usize,
    pub rank_q: usize,
    pub dim_image_sum: usize,
    pub q_idempotent: bool,
    pub image_identity: bool,
    pub matches_support_projection: bool,
}

impl AlphaPiRecord {
    pub fn passed(&self) -> bool {
        self.q_idempotent && self.image_identity && self.matches_support_projection
    }
}

/// Builds `F` for a derived system coming from `action` and `rep`, and checks
/// that the action preserves the block constraint.
pub fn build_f(
    sys: IdempotentSystem,
    action: Arc<CellAction>,
    rep: Arc<LinearRep>,
) -> Result<BlockSpace> {
    BlockSpace::new(sys, action, rep)
}

impl BlockSpace {
    pub fn new(
        sys: IdempotentSystem,
        action: Arc<CellAction>,
        rep: Arc<LinearRep>,
    ) -> Result<Self> {
        if !sys.is_derived() {
            return Err(Error::InconsistentSystem(
                "cell idempotents have not been derived".into(),
            ));
        }
        if !Arc::ptr_eq(action.complex(), sys.complex())
            && action.complex().as_ref() != sys.complex().as_ref()
        {
            return Err(Error::InconsistentSystem(
                "action and system live on different complexes".into(),
            ));
        }
        if rep.dim() != sys.dim() || rep.field() != sys.field() {
            return Err(Error::InconsistentSystem(
                "representation does not match the system".into(),
            ));
        }
        let n = sys.complex().num_cells();
        let mut bases = Vec::with_capacity(n);
        let mut pivots = Vec::with_capacity(n);
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for sigma in 0..n {
            let image = sys.cell_idempotent(sigma).image();
            pivots.push(image.pivots().to_vec());
            bases.push(inclusion_matrix(&image));
            offsets.push(offsets[sigma] + image.dim());
        }
        let space = BlockSpace {
            sys,
            action,
            rep,
            bases,
            pivots,
            offsets,
        };
        space.check_block_constraint(space.action.group().generators().iter().copied())?;
        Ok(space)
    }

    /// `e_{gσ} ρ(g) B_σ = ρ(g) B_σ` for the listed `g`.
    pub fn check_block_constraint(&self, elements: impl IntoIterator<Item = usize>) -> Result<()> {
        for g in elements {
            for sigma in 0..self.num_cells() {
                let tau = self.action.act(g, sigma);
                let moved = self.rep.rho(g).mul(&self.bases[sigma]);
                if self.sys.cell_idempotent(tau).mul(&moved) != moved {
                    return Err(Error::InconsistentSystem(format!(
                        "element {g} moves block {sigma} outside im(e_{tau})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn system(&self) -> &IdempotentSystem {
        &self.sys
    }

    pub fn action(&self) -> &Arc<CellAction> {
        &self.action
    }

    pub fn rep(&self) -> &Arc<LinearRep> {
        &self.rep
    }

    pub fn field(&self) -> FieldSpec {
        self.sys.field()
    }

    pub fn dim(&self) -> usize {
        *self.offsets.last().expect("non-empty offsets")
    }

    pub fn dim_v(&self) -> usize {
        self.sys.dim()
    }

    pub fn num_cells(&self) -> usize {
        self.bases.len()
    }

    pub fn block_range(&self, sigma: CellId) -> Range<usize> {
        self.offsets[sigma]..self.offsets[sigma + 1]
    }

    pub fn rank(&self, sigma: CellId) -> usize {
        self.bases[sigma].cols()
    }

    /// Inclusion `e_σ V ↪ V` in block coordinates.
    pub fn basis(&self, sigma: CellId) -> &Matrix {
        &self.bases[sigma]
    }

    /// Coordinates in block `σ` of a vector of `im(e_σ)`.
    pub fn coordinates(&self, sigma: CellId, v: &Matrix) -> Matrix {
        v.select_rows(&self.pivots[sigma])
    }

    /// The block of `ψ` at `σ` as a vector of `V`.
    pub fn block_vector(&self, sigma: CellId, psi: &[Scalar]) -> Vec<Scalar> {
        self.bases[sigma].mul_vec(&psi[self.block_range(sigma)])
    }

    /// `π(ψ) = Σ_σ ψ(σ)`.
    pub fn pi(&self) -> Matrix {
        let mut m = Matrix::zeros(self.field(), self.dim_v(), self.dim());
        for sigma in 0..self.num_cells() {
            m.set_block(0, self.offsets[sigma], &self.bases[sigma]);
        }
        m
    }

    /// `α(v)(σ) = (−1)^{dim σ} e_σ v`.
    pub fn alpha(&self) -> Matrix {
        let mut m = Matrix::zeros(self.field(), self.dim(), self.dim_v());
        for sigma in 0..self.num_cells() {
            let e = self.sys.cell_idempotent(sigma);
            let mut block = self.coordinates(sigma, e);
            if self.sys.complex().dim_of(sigma) % 2 == 1 {
                block = block.neg();
            }
            m.set_block(self.offsets[sigma], 0, &block);
        }
        m
    }

    /// The part of `ρ_F(g)` sending block `σ` to block `g·σ`.
    pub fn block_action(&self, g: usize, sigma: CellId) -> (CellId, Matrix) {
        let tau = self.action.act(g, sigma);
        (
            tau,
            self.coordinates(tau, &self.rep.rho(g).mul(&self.bases[sigma])),
        )
    }

    /// `ρ_F(g)` as a dense matrix.
    pub fn action_matrix(&self, g: usize) -> Matrix {
        let mut m = Matrix::zeros(self.field(), self.dim(), self.dim());
        for sigma in 0..self.num_cells() {
            let (tau, block) = self.block_action(g, sigma);
            m.set_block(self.offsets[tau], self.offsets[sigma], &block);
        }
        m
    }

    /// `ρ_F(g) ψ`.
    pub fn act(&self, g: usize, psi: &[Scalar]) -> Vec<Scalar> {
        let mut out = vec![self.field().zero(); self.dim()];
        for sigma in 0..self.num_cells() {
            let (tau, block) = self.block_action(g, sigma);
            let image = block.mul_vec(&psi[self.block_range(sigma)]);
            out[self.block_range(tau)].clone_from_slice(&image);
        }
        out
    }

    /// Every block of `ρ_F(g)`, indexed by source cell.
    fn blocks_of(&self, g: usize) -> Vec<(CellId, Matrix)> {
        (0..self.num_cells())
            .map(|sigma| self.block_action(g, sigma))
            .collect()
    }

    /// `ρ_F(s h) = ρ_F(s) ρ_F(h)` blockwise for generators `s` and listed `h`.
    pub fn action_is_multiplicative(&self, elements: &[usize]) -> bool {
        let g = self.action.group();
        let mut cache: HashMap<usize, Vec<(CellId, Matrix)>> = HashMap::new();
        for &s in g.generators() {
            for &h in elements {
                for x in [s, h, g.mul(s, h)] {
                    cache.entry(x).or_insert_with(|| self.blocks_of(x));
                }
                let (bs, bh, bsh) = (&cache[&s], &cache[&h], &cache[&g.mul(s, h)]);
                let ok = (0..self.num_cells()).all(|sigma| {
                    let (mid, inner) = &bh[sigma];
                    let (tau, outer) = &bs[*mid];
                    let (tau2, direct) = &bsh[sigma];
                    tau == tau2 && outer.mul(inner) == *direct
                });
                if !ok {
                    return false;
                }
            }
        }
        true
    }

    /// `ρ_F(g) α = α ρ(g)`, compared block by block.
    pub fn alpha_is_equivariant(&self, elements: &[usize]) -> bool {
        let alpha = self.alpha();
        let rows: Vec<Matrix> = (0..self.num_cells())
            .map(|sigma| {
                let r = self.block_range(sigma);
                alpha.block(r.start, 0, r.len(), self.dim_v())
            })
            .collect();
        elements.iter().all(|&e| {
            let rho = self.rep.rho(e);
            self.blocks_of(e)
                .iter()
                .enumerate()
                .all(|(sigma, (tau, block))| block.mul(&rows[sigma]) == rows[*tau].mul(rho))
        })
    }
    /// `ρ(g) π = π ρ_F(g)`, compared block by block.
    pub fn pi_is_equivariant(&self, elements: &[usize]) -> bool {
        elements.iter().all(|&e| {
            (0..self.num_cells()).all(|sigma| {
                let moved = self.rep.rho(e).mul(&self.bases[sigma]);
                let tau = self.action.act(e, sigma);
                moved == self.bases[tau].mul(&self.coordinates(tau, &moved))
            })
        })
    }

    pub fn is_fixed(&self, u: &Subgroup, psi: &[Scalar]) -> bool {
        u.elements().iter().all(|&g| self.act(g, psi) == psi)
    }

    /// `|U|⁻¹ Σ_{u ∈ U} ρ_F(u) ψ`, a block function fixed by `U`.
    pub fn average(&self, u: &Subgroup, psi: &[Scalar]) -> Result<Vec<Scalar>> {
        let f = self.field();
        let inv = f.inv(&f.from_i64(u.order() as i64)).ok_or_else(|| {
            Error::bad_characteristic(
                f.characteristic(),
                "averaging a block function",
                u.elements(),
            )
        })?;
        let mut acc = vec![f.zero(); self.dim()];
        for &g in u.elements() {
            for (a, b) in acc.iter_mut().zip(self.act(g, psi)) {
                *a = f.add(a, &b);
            }
        }
        Ok(acc.iter().map(|a| f.mul(a, &inv)).collect())
    }

    fn require_fixed(&self, u: &Subgroup, psi: &[Scalar]) -> Result<Matrix> {
        let av = averaging_idempotent(u, &self.rep)?;
        if psi.len() != self.dim() {
            return Err(Error::DimensionMismatch(format!(
                "block function of length {}",
                psi.len()
            )));
        }
        if !self.is_fixed(u, psi) {
            return Err(Error::NotFixed);
        }
        Ok(av)
    }

    /// `π̄_U(ψ) = Σ_σ av(U) ψ(σ)` for `ψ` fixed by `U`.
    pub fn pi_bar(&self, u: &Subgroup, psi: &[Scalar]) -> Result<Vec<Scalar>> {
        let av = self.require_fixed(u, psi)?;
        let f = self.field();
        let mut out = vec![f.zero(); self.dim_v()];
        for sigma in 0..self.num_cells() {
            let term = av.mul_vec(&self.block_vector(sigma, psi));
            for (o, t) in out.iter_mut().zip(term) {
                *o = f.add(o, &t);
            }
        }
        Ok(out)
    }

    /// `π̄_{U'}(ψ)` evaluated as `[U':U]⁻¹ Σ_{g ∈ U'/U} Σ_σ av(U) ρ(g) ψ(g⁻¹σ)`
    /// for `U` normal in `U'`, both fixing `ψ`.
    pub fn pi_bar_reindexed(
        &self,
        u: &Subgroup,
        u_big: &Subgroup,
        psi: &[Scalar],
    ) -> Result<Vec<Scalar>> {
        let group = self.action.group();
        if !u.is_normal_in(group, u_big) {
            return Err(Error::InvalidGroup(
                "the smaller subgroup must be normal in the larger".into(),
            ));
        }
        self.require_fixed(u_big, psi)?;
        let av = self.require_fixed(u, psi)?;
        let f = self.field();
        let reps = u.left_coset_representatives(group, u_big);
        let index_inv = f.inv(&f.from_i64(reps.len() as i64)).ok_or_else(|| {
            Error::bad_characteristic(f.characteristic(), "subgroup index", u_big.elements())
        })?;
        let mut out = vec![f.zero(); self.dim_v()];
        for &g in &reps {
            let av_g = av.mul(self.rep.rho(g));
            for sigma in 0..self.num_cells() {
                let source = self.action.act(group.inv(g), sigma);
                let term = av_g.mul_vec(&self.block_vector(source, psi));
                for (o, t) in out.iter_mut().zip(term) {
                    *o = f.add(o, &t);
                }
            }
        }
        Ok(out.iter().map(|o| f.mul(o, &index_inv)).collect())
    }

    /// Checks on `q = π α`: idempotent, image `Σ_x im(e_x)`, equal to the
    /// support projection of the whole complex.
    pub fn verify_alpha_pi(&self) -> Result<AlphaPiRecord> {
        let q = self.pi().mul(&self.alpha());
        let vertices: Vec<CellId> = (0..self.sys.complex().num_vertices()).collect();
        let image_sum = self.sys.image_sum(&vertices);
        let whole = crate::complex::Subcomplex::whole(self.sys.complex());
        let u = self.sys.alternating_sum(&whole)?;
        let image = q.image();
        Ok(AlphaPiRecord {
            dim_f: self.dim(),
            rank_q: image.dim(),
            dim_image_sum: image_sum.dim(),
            q_idempotent: q.is_idempotent()?,
            image_identity: image == image_sum,
            matches_support_projection: q == u,
        })
    }
}
