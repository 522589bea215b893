//! Systems of commuting vertex idempotents on a complex, the cell idempotents
//! they induce, and support projections of subcomplexes.

use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use crate::complex::{geodesic, CellId, Complex, Subcomplex};
use crate::error::{Error, Result};
use crate::group::{CellAction, LinearRep};
use crate::linalg::{FieldSpec, Matrix, MatrixRecord, Subspace};

/// Flags describing which consistency conditions a system satisfies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    /// Vertex idempotents of every cell commute pairwise.
    pub commuting_on_cells: bool,
    /// `e_x e_z = e_x e_y e_z` for `y` on the geodesic from `x` to `z`; `None` off trees.
    pub path_condition: Option<bool>,
    /// First violating triple `(x, y, z)`, if any.
    pub path_violation: Option<(CellId, CellId, CellId)>,
}

/// Vertex idempotents `e_x` on a complex and, once derived, `e_σ = ∏_{x ∈ σ} e_x`.
#[derive(Debug, Clone)]
pub struct IdempotentSystem {
    complex: Arc<Complex>,
    field: FieldSpec,
    dim: usize,
    vertex: Vec<Matrix>,
    cells: Vec<Matrix>,
    report: Option<ConsistencyReport>,
    vertex_images: OnceLock<Vec<Subspace>>,
}

/// Serialised form: complex hash plus per-vertex matrices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemRecord {
    pub complex: String,
    pub field: FieldSpec,
    pub dim: usize,
    pub vertex_idempotents: Vec<MatrixRecord>,
}

/// Outcome of checking the support projection identities on one subcomplex.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub cells: usize,
    pub vertices: usize,
    /// `None` when convexity cannot be decided (non-tree complexes).
    pub convex: Option<bool>,
    pub rank_u: usize,
    pub dim_image_sum: usize,
    pub dim_kernel_intersection: usize,
    pub idempotent: bool,
    pub image_identity: bool,
    pub kernel_identity: bool,
}

impl VerificationRecord {
    pub fn passed(&self) -> bool {
        self.idempotent && self.image_identity && self.kernel_identity
    }
}

impl IdempotentSystem {
    /// Vertex idempotents, one per vertex in id order; each must be idempotent.
    pub fn new(
        complex: Arc<Complex>,
        field: FieldSpec,
        dim: usize,
        vertex: Vec<Matrix>,
    ) -> Result<Self> {
        if vertex.len() != complex.num_vertices() {
            return Err(Error::InconsistentSystem(format!(
                "{} idempotents for {} vertices",
                vertex.len(),
                complex.num_vertices()
            )));
        }
        for (x, e) in vertex.iter().enumerate() {
            if e.rows() != dim || e.cols() != dim || e.field() != field {
                return Err(Error::InconsistentSystem(format!(
                    "e[{x}] has the wrong shape or field"
                )));
            }
            if !e.is_idempotent()? {
                return Err(Error::InconsistentSystem(format!(
                    "e[{x}] is not idempotent"
                )));
            }
        }
        Ok(IdempotentSystem {
            complex,
            field,
            dim,
            vertex,
            cells: Vec::new(),
            report: None,
            vertex_images: OnceLock::new(),
        })
    }

    pub fn from_record(complex: Arc<Complex>, record: SystemRecord) -> Result<Self> {
        if record.complex != complex.hash() {
            return Err(Error::InconsistentSystem(
                "record belongs to a different complex".into(),
            ));
        }
        let vertex = record
            .vertex_idempotents
            .into_iter()
            .map(Matrix::try_from)
            .collect::<Result<Vec<_>>>()?;
        Self::new(complex, record.field, record.dim, vertex)
    }

    pub fn record(&self) -> SystemRecord {
        SystemRecord {
            complex: self.complex.hash().to_string(),
            field: self.field,
            dim: self.dim,
            vertex_idempotents: self
                .vertex
                .iter()
                .cloned()
                .map(MatrixRecord::from)
                .collect(),
        }
    }

    /// Populate `e_σ` for every cell. Products are taken in increasing and in
    /// decreasing vertex order and must agree; each must be idempotent.
    pub fn derive_cell_idempotents(mut self) -> Result<Self> {
        let c = &self.complex;
        let mut cells = Vec::with_capacity(c.num_cells());
        for sigma in 0..c.num_cells() {
            let vs = c.vertices_of(sigma);
            if vs.len() == 1 {
                cells.push(self.vertex[vs[0]].clone());
                continue;
            }
            for (i, &x) in vs.iter().enumerate() {
                for &y in &vs[i + 1..] {
                    if !self.vertex[x].commutes_with(&self.vertex[y]) {
                        return Err(Error::NonCommutingOnCell(sigma));
                    }
                }
            }
            let forward = vs[1..].iter().fold(self.vertex[vs[0]].clone(), |acc, &x| {
                acc.mul(&self.vertex[x])
            });
            let n = vs.len();
            let backward = vs[..n - 1]
                .iter()
                .rev()
                .fold(self.vertex[vs[n - 1]].clone(), |acc, &x| {
                    acc.mul(&self.vertex[x])
                });
            if forward != backward || !forward.is_idempotent()? {
                return Err(Error::NonCommutingOnCell(sigma));
            }
            cells.push(forward);
        }
        self.cells = cells;
        self.report = Some(ConsistencyReport {
            commuting_on_cells: true,
            path_condition: None,
            path_violation: None,
        });
        if self.complex.is_tree() {
            let violation = self.find_path_violation();
            let report = self.report.as_mut().expect("just set");
            report.path_condition = Some(violation.is_none());
            report.path_violation = violation;
        }
        Ok(self)
    }

    fn find_path_violation(&self) -> Option<(CellId, CellId, CellId)> {
        let n = self.complex.num_vertices();
        for x in 0..n {
            for z in x + 1..n {
                let path = geodesic(&self.complex, x, z).expect("tree");
                if path.len() < 3 {
                    continue;
                }
                let xz = self.vertex[x].mul(&self.vertex[z]);
                for &y in &path[1..path.len() - 1] {
                    if self.vertex[x].mul(&self.vertex[y]).mul(&self.vertex[z]) != xz {
                        return Some((x, y, z));
                    }
                }
            }
        }
        None
    }

    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    pub fn field(&self) -> FieldSpec {
        self.field
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_idempotent(&self, x: CellId) -> &Matrix {
        &self.vertex[x]
    }

    pub fn is_derived(&self) -> bool {
        !self.cells.is_empty() || self.complex.num_cells() == 0
    }

    /// `e_σ`; requires [`IdempotentSystem::derive_cell_idempotents`].
    pub fn cell_idempotent(&self, sigma: CellId) -> &Matrix {
        assert!(self.is_derived(), "cell idempotents have not been derived");
        &self.cells[sigma]
    }

    pub fn consistency(&self) -> Option<&ConsistencyReport> {
        self.report.as_ref()
    }

    fn require_derived(&self) -> Result<()> {
        if self.is_derived() {
            Ok(())
        } else {
            Err(Error::InconsistentSystem(
                "cell idempotents have not been derived".into(),
            ))
        }
    }

    /// `Σ_{σ ∈ Σ} (−1)^{dim σ} e_σ`, summed over cells in id order, without any
    /// convexity requirement.
    pub fn alternating_sum(&self, s: &Subcomplex) -> Result<Matrix> {
        self.require_derived()?;
        if !s.belongs_to(&self.complex) {
            return Err(Error::InvalidComplex(
                "subcomplex of a different complex".into(),
            ));
        }
        let mut u = Matrix::zeros(self.field, self.dim, self.dim);
        for &sigma in s.cells() {
            if self.complex.dim_of(sigma) % 2 == 0 {
                u.add_assign(&self.cells[sigma]);
            } else {
                u.add_assign(&self.cells[sigma].neg());
            }
        }
        Ok(u)
    }

    /// Support projection `u_Σ` of a convex subcomplex of a tree.
    pub fn support_projection(&self, s: &Subcomplex) -> Result<Matrix> {
        if !self.complex.is_convex(s)? {
            return Err(Error::NotConvex);
        }
        self.alternating_sum(s)
    }

    /// Support projection on a complex where convexity cannot be checked; the
    /// caller asserts it.
    pub fn support_projection_asserted(&self, s: &Subcomplex) -> Result<Matrix> {
        self.alternating_sum(s)
    }

    /// `Σ_{x ∈ Σ⁰} im(e_x)`, as the row space of the stacked image bases.
    pub fn image_sum(&self, vertices: &[CellId]) -> Subspace {
        let images = self
            .vertex_images
            .get_or_init(|| self.vertex.iter().map(Matrix::image).collect());
        let parts: Vec<&Matrix> = vertices.iter().map(|&x| images[x].basis()).collect();
        Subspace::from_rows(
            &Matrix::vstack_all(self.field, self.dim, &parts).expect("same ambient"),
        )
    }

    /// `⋂_{x ∈ Σ⁰} ker(e_x)`, as the kernel of the stacked idempotents.
    pub fn kernel_intersection(&self, vertices: &[CellId]) -> Subspace {
        let parts: Vec<&Matrix> = vertices.iter().map(|&x| &self.vertex[x]).collect();
        Matrix::vstack_all(self.field, self.dim, &parts)
            .expect("same ambient")
            .kernel()
    }

    pub fn verify_support_projection(&self, s: &Subcomplex) -> Result<VerificationRecord> {
        let u = self.alternating_sum(s)?;
        let vertices = s.vertices(&self.complex);
        let convex = if self.complex.is_tree() {
            Some(self.complex.is_convex(s)?)
        } else {
            None
        };
        let image = u.image();
        let kernel = u.kernel();
        let image_sum = self.image_sum(&vertices);
        let kernel_cap = self.kernel_intersection(&vertices);
        Ok(VerificationRecord {
            cells: s.len(),
            vertices: vertices.len(),
            convex,
            rank_u: image.dim(),
            dim_image_sum: image_sum.dim(),
            dim_kernel_intersection: kernel_cap.dim(),
            idempotent: u.is_idempotent()?,
            image_identity: image == image_sum,
            kernel_identity: kernel == kernel_cap,
        })
    }

    /// Whether `ρ(g) u_Σ ρ(g)⁻¹ = u_{gΣ}` for every listed `g`.
    pub fn support_projection_equivariant(
        &self,
        action: &CellAction,
        rep: &LinearRep,
        s: &Subcomplex,
        elements: impl IntoIterator<Item = usize>,
    ) -> Result<bool> {
        let u = self.alternating_sum(s)?;
        let g = action.group();
        for e in elements {
            let moved = self.alternating_sum(&action.act_subcomplex(e, s))?;
            if rep.rho(e).mul(&u).mul(rep.rho(g.inv(e))) != moved {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Least level `n` with `e[n][x] v = v`, or `None` if no level reaches `v`.
pub fn approximate_unit_check(
    levels: &[IdempotentSystem],
    x: CellId,
    v: &[crate::linalg::Scalar],
) -> Option<usize> {
    levels
        .iter()
        .position(|sys| sys.vertex_idempotent(x).mul_vec(v) == v)
}

#[cfg(test)]
mod tests;
