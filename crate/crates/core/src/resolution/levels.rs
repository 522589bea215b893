use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::BlockSpace;
use crate::error::{Error, Result};
use crate::group::{CellAction, LinearRep};
use crate::idempotents::IdempotentSystem;
use crate::linalg::Matrix;

/// `α^n: V → F^n` and `π^n: F^n → V` for one level.
#[derive(Debug, Clone)]
pub struct LevelMap {
    pub alpha: Matrix,
    pub pi: Matrix,
}

impl LevelMap {
    /// `q_n = π^n α^n`.
    pub fn q(&self) -> Matrix {
        self.pi.mul(&self.alpha)
    }
}

/// Block spaces and level maps for every level of a family.
#[derive(Debug, Clone)]
pub struct LevelMaps {
    pub spaces: Vec<BlockSpace>,
    pub maps: Vec<LevelMap>,
}

impl LevelMaps {
    /// Takes one derived system per level.
    pub fn build(
        systems: Vec<IdempotentSystem>,
        action: Arc<CellAction>,
        rep: Arc<LinearRep>,
    ) -> Result<Self> {
        let spaces = systems
            .into_iter()
            .map(|s| BlockSpace::new(s, action.clone(), rep.clone()))
            .collect::<Result<Vec<_>>>()?;
        let maps = spaces
            .iter()
            .map(|s| LevelMap {
                alpha: s.alpha(),
                pi: s.pi(),
            })
            .collect();
        Ok(LevelMaps { spaces, maps })
    }

    pub fn composites(&self) -> Vec<Matrix> {
        self.maps.iter().map(LevelMap::q).collect()
    }
}

/// Global `α: V → ⊕_n F^n` and `π: ⊕_n F^n → V`.
#[derive(Debug, Clone)]
pub struct MultiLevel {
    pub alpha: Matrix,
    pub pi: Matrix,
    /// Start of each level's block inside `⊕_n F^n`.
    pub offsets: Vec<usize>,
    /// Pieces `α(v)_n = α^n (Id − q_{n−1}) v`.
    pub pieces: Vec<Matrix>,
    /// `π α = Id_V`.
    pub telescopes: bool,
}

fn check_increasing(qs: &[Matrix]) -> Result<()> {
    for n in 1..qs.len() {
        let (lo, hi) = (&qs[n - 1], &qs[n]);
        if &hi.mul(lo) != lo || &lo.mul(hi) != lo {
            return Err(Error::NotIncreasing(n));
        }
    }
    Ok(())
}

/// Telescoping `α(v)_n = α^n (Id − π^{n−1} α^{n−1}) v` over increasing levels
/// with an exhaustive top level.
pub fn multi_level_alpha(levels: &[LevelMap]) -> Result<MultiLevel> {
    let first = levels.first().ok_or(Error::NotExhaustive)?;
    let field = first.alpha.field();
    let dim_v = first.alpha.cols();
    let qs: Vec<Matrix> = levels.iter().map(LevelMap::q).collect();
    check_increasing(&qs)?;
    if !qs.last().expect("non-empty").is_identity() {
        return Err(Error::NotExhaustive);
    }
    let id = Matrix::identity(field, dim_v);
    let mut pieces = Vec::with_capacity(levels.len());
    let mut offsets = Vec::with_capacity(levels.len());
    let mut at = 0;
    for (n, level) in levels.iter().enumerate() {
        let piece = if n == 0 {
            level.alpha.clone()
        } else {
            level.alpha.mul(&id.sub(&qs[n - 1]))
        };
        offsets.push(at);
        at += piece.rows();
        pieces.push(piece);
    }
    let refs: Vec<&Matrix> = pieces.iter().collect();
    let alpha = Matrix::vstack_all(field, dim_v, &refs)?;
    let mut pi = Matrix::zeros(field, dim_v, at);
    for (level, &off) in levels.iter().zip(&offsets) {
        pi.set_block(0, off, &level.pi);
    }
    let telescopes = pi.mul(&alpha).is_identity();
    Ok(MultiLevel {
        alpha,
        pi,
        offsets,
        pieces,
        telescopes,
    })
}

/// Projectors `p_n = q_n − q_{n−1}` and the checks on them.
#[derive(Debug, Clone)]
pub struct Decomposition {
    pub projectors: Vec<Matrix>,
    pub ranks: Vec<usize>,
    pub idempotent: bool,
    pub orthogonal: bool,
    pub sums_to_identity: bool,
}

/// Summary of a [`Decomposition`] for reports.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionRecord {
    pub ranks: Vec<usize>,
    pub idempotent: bool,
    pub orthogonal: bool,
    pub sums_to_identity: bool,
}

impl Decomposition {
    pub fn passed(&self) -> bool {
        self.idempotent && self.orthogonal && self.sums_to_identity
    }

    pub fn record(&self) -> DecompositionRecord {
        DecompositionRecord {
            ranks: self.ranks.clone(),
            idempotent: self.idempotent,
            orthogonal: self.orthogonal,
            sums_to_identity: self.sums_to_identity,
        }
    }
}

/// Splits `V` along an increasing sequence of composite idempotents.
pub fn smooth_product_decomposition(qs: &[Matrix]) -> Result<Decomposition> {
    check_increasing(qs)?;
    let first = qs.first().ok_or(Error::NotExhaustive)?;
    let (field, dim) = (first.field(), first.rows());
    let projectors: Vec<Matrix> = qs
        .iter()
        .enumerate()
        .map(|(n, q)| if n == 0 { q.clone() } else { q.sub(&qs[n - 1]) })
        .collect();
    let ranks = projectors.iter().map(Matrix::rank).collect();
    let idempotent = projectors
        .iter()
        .all(|p| p.is_idempotent().unwrap_or(false));
    let orthogonal = projectors.iter().enumerate().all(|(i, p)| {
        projectors
            .iter()
            .enumerate()
            .all(|(j, r)| i == j || p.mul(r).is_zero())
    });
    let mut total = Matrix::zeros(field, dim, dim);
    for p in &projectors {
        total.add_assign(p);
    }
    Ok(Decomposition {
        projectors,
        ranks,
        idempotent,
        orthogonal,
        sums_to_identity: total.is_identity(),
    })
}
