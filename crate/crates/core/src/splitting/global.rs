use std::collections::HashMap;
use std::sync::Arc;

use super::certificate::{
    CertificateKind, EquivarianceScope, SplittingCertificate, TranscriptEntry,
};
use super::{local_retraction_in, local_section_in, Extension};
use crate::complex::CellId;
use crate::error::{Error, Result};
use crate::group::{build_level_system, CellAction, LevelFamily, LinearRep, Subgroup};
use crate::linalg::{Matrix, MatrixRecord};
use crate::resolution::{multi_level_alpha, BlockSpace, LevelMaps, MultiLevel};

/// The cell action and level family used to resolve a representation.
#[derive(Debug, Clone)]
pub struct LevelData {
    pub action: Arc<CellAction>,
    pub family: LevelFamily,
}

const NOTES: [&str; 3] = [
    "initial linear maps are canonical (pivot columns or rows); averaging makes any choice equivariant",
    "coset representatives are the least group element in each coset",
    "every subgroup of a finite group is compact, so the compact and compact-modulo-centre cases coincide \
     and the cuspidality requirement reduces to the exhaustive-level precondition",
];

/// The `G`-map on the orbit of `σ` in `F` determined by a `G_σ`-equivariant
/// `h: e_σV → W` (in block coordinates): on the block at `τ = gσ` it is
/// `ρ_W(g) h ρ_F(g⁻¹)`. Returned as a `dim W × dim F` matrix vanishing off the orbit.
pub fn frobenius_lift(
    space: &BlockSpace,
    sigma: CellId,
    h: &Matrix,
    w: &LinearRep,
) -> Result<Matrix> {
    let action = space.action();
    let group = action.group();
    if h.rows() != w.dim() || h.cols() != space.rank(sigma) {
        return Err(Error::DimensionMismatch(format!(
            "local map at cell {sigma} has the wrong shape"
        )));
    }
    let stab = action.stabilizer(sigma);
    for &k in stab.elements() {
        if w.rho(k).mul(h) != h.mul(&space.block_action(k, sigma).1) {
            return Err(Error::NotLocallyEquivariant(sigma));
        }
    }
    let other = *stab
        .elements()
        .last()
        .expect("stabilizers contain the identity");
    let mut out = Matrix::zeros(space.field(), w.dim(), space.dim());
    for tau in action.orbit(sigma) {
        let g = action
            .transporter(sigma, tau)
            .expect("tau lies in the orbit");
        let block_at = |g: usize| {
            w.rho(g)
                .mul(h)
                .mul(&space.block_action(group.inv(g), tau).1)
        };
        let map = block_at(g);
        if block_at(group.mul(g, other)) != map {
            return Err(Error::NotLocallyEquivariant(sigma));
        }
        out.set_block(0, space.block_range(tau).start, &map);
    }
    Ok(out)
}

/// Dual of [`frobenius_lift`]: from a `G_σ`-equivariant `ε: W → e_σV` (block
/// coordinates), the `G`-map `W → F` whose block at `τ = gσ` is `ρ_F(g) ε ρ_W(g⁻¹)`.
fn frobenius_colift(
    space: &BlockSpace,
    sigma: CellId,
    eps: &Matrix,
    w: &LinearRep,
) -> Result<Matrix> {
    let action = space.action();
    let group = action.group();
    let stab = action.stabilizer(sigma);
    for &k in stab.elements() {
        if space.block_action(k, sigma).1.mul(eps) != eps.mul(w.rho(k)) {
            return Err(Error::NotLocallyEquivariant(sigma));
        }
    }
    let other = *stab
        .elements()
        .last()
        .expect("stabilizers contain the identity");
    let mut out = Matrix::zeros(space.field(), space.dim(), w.dim());
    for tau in action.orbit(sigma) {
        let g = action
            .transporter(sigma, tau)
            .expect("tau lies in the orbit");
        let block_at = |g: usize| {
            space
                .block_action(g, sigma)
                .1
                .mul(eps)
                .mul(w.rho(group.inv(g)))
        };
        let map = block_at(g);
        if block_at(group.mul(g, other)) != map {
            return Err(Error::NotLocallyEquivariant(sigma));
        }
        out.set_block(space.block_range(tau).start, 0, &map);
    }
    Ok(out)
}

fn resolve(rep: &Arc<LinearRep>, data: &LevelData) -> Result<(LevelMaps, MultiLevel)> {
    let systems = build_level_system(&data.action, rep, &data.family)?
        .into_iter()
        .map(|s| s.derive_cell_idempotents())
        .collect::<Result<Vec<_>>>()?;
    let maps = LevelMaps::build(systems, data.action.clone(), rep.clone())?;
    let ml = multi_level_alpha(&maps.maps)?;
    Ok((maps, ml))
}

fn stabilizer_context(sigma: CellId, level: usize) -> String {
    format!("stabilizer of cell {sigma} (level {level})")
}

fn finish(
    kind: CertificateKind,
    ext: &Extension,
    map: Matrix,
    mut transcript: Vec<TranscriptEntry>,
) -> Result<SplittingCertificate> {
    let mut cert = SplittingCertificate {
        kind,
        field: ext.field(),
        inputs: ext.hashes(),
        map: MatrixRecord::from(map),
        scope: EquivarianceScope::Global,
        transcript: Vec::new(),
        notes: NOTES.iter().map(|s| s.to_string()).collect(),
    };
    transcript.extend(cert.verify(ext)?);
    cert.transcript = transcript;
    Ok(cert)
}

/// Equivariant section `s = Σ_n L_n α_n` of `p`, where `α` telescopes over
/// the levels of the quotient and each `L_n: F^n → W` lifts `π^n` through `p`
/// orbit by orbit.
pub fn construct_global_section(ext: &Extension, data: &LevelData) -> Result<SplittingCertificate> {
    let (maps, ml) = resolve(&ext.quotient, data)?;
    let action = &data.action;
    let mut local: HashMap<Subgroup, Matrix> = HashMap::new();
    let mut transcript = vec![TranscriptEntry::new(
        "π∘α = Id on W″ (telescoping)",
        ml.telescopes,
    )];
    let mut s = Matrix::zeros(ext.field(), ext.total.dim(), ext.quotient.dim());
    let mut lifts_match = true;
    for (n, space) in maps.spaces.iter().enumerate() {
        let mut l = Matrix::zeros(ext.field(), ext.total.dim(), space.dim());
        for sigma in action.orbit_representatives() {
            let stab = action.stabilizer(sigma);
            if !local.contains_key(&stab) {
                let section = local_section_in(ext, &stab, &stabilizer_context(sigma, n))?;
                local.insert(stab.clone(), section);
            }
            let h = local[&stab].mul(space.basis(sigma));
            l.add_assign(&frobenius_lift(space, sigma, &h, &ext.total)?);
        }
        lifts_match &= ext.projection.mul(&l) == maps.maps[n].pi;
        s.add_assign(&l.mul(&ml.pieces[n]));
    }
    transcript.push(TranscriptEntry::new(
        "p∘L_n = π^n at every level",
        lifts_match,
    ));
    transcript.push(TranscriptEntry::new(
        "p∘s = π∘α",
        ext.projection.mul(&s) == ml.pi.mul(&ml.alpha),
    ));
    finish(CertificateKind::Section, ext, s, transcript)
}

/// Equivariant retraction `r = Σ_n π^n E_n` of `i`, where `E^n: W → F^n`
/// extends `α^n` across `i` orbit by orbit and `E_n = E^n − α^n π^{n−1} E^{n−1}`.
pub fn construct_global_retraction(
    ext: &Extension,
    data: &LevelData,
) -> Result<SplittingCertificate> {
    let (maps, ml) = resolve(&ext.sub, data)?;
    let action = &data.action;
    let complex = action.complex();
    let mut local: HashMap<Subgroup, Matrix> = HashMap::new();
    let mut transcript = vec![TranscriptEntry::new(
        "π∘α = Id on W′ (telescoping)",
        ml.telescopes,
    )];
    let mut singles: Vec<Matrix> = Vec::with_capacity(maps.spaces.len());
    for (n, space) in maps.spaces.iter().enumerate() {
        let mut e = Matrix::zeros(ext.field(), space.dim(), ext.total.dim());
        for sigma in action.orbit_representatives() {
            let stab = action.stabilizer(sigma);
            if !local.contains_key(&stab) {
                let retraction = local_retraction_in(ext, &stab, &stabilizer_context(sigma, n))?;
                local.insert(stab.clone(), retraction);
            }
            let mut eps = space.coordinates(
                sigma,
                &space.system().cell_idempotent(sigma).mul(&local[&stab]),
            );
            if complex.dim_of(sigma) % 2 == 1 {
                eps = eps.neg();
            }
            e.add_assign(&frobenius_colift(space, sigma, &eps, &ext.total)?);
        }
        singles.push(e);
    }
    let extends = singles
        .iter()
        .zip(&maps.maps)
        .all(|(e, m)| e.mul(&ext.inclusion) == m.alpha);
    transcript.push(TranscriptEntry::new("E^n∘i = α^n at every level", extends));
    let mut r = Matrix::zeros(ext.field(), ext.sub.dim(), ext.total.dim());
    for n in 0..singles.len() {
        let e_n = if n == 0 {
            singles[0].clone()
        } else {
            singles[n].sub(
                &maps.maps[n]
                    .alpha
                    .mul(&maps.maps[n - 1].pi)
                    .mul(&singles[n - 1]),
            )
        };
        r.add_assign(&maps.maps[n].pi.mul(&e_n));
    }
    transcript.push(TranscriptEntry::new(
        "r∘i = π∘α",
        r.mul(&ext.inclusion) == ml.pi.mul(&ml.alpha),
    ));
    finish(CertificateKind::Retraction, ext, r, transcript)
}
