use serde::{Deserialize, Serialize};

use super::Extension;
use crate::error::Result;
use crate::group::{intertwines, Subgroup};
use crate::linalg::{FieldSpec, Matrix, MatrixRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateKind {
    /// `s: W″ → W` with `p s = Id`.
    Section,
    /// `r: W → W′` with `r i = Id`.
    Retraction,
}

/// Elements for which equivariance is claimed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EquivarianceScope {
    LinearOnly,
    Subgroups(Vec<Subgroup>),
    Global,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputHashes {
    pub sub: String,
    pub total: String,
    pub quotient: String,
    pub inclusion: String,
    pub projection: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptEntry {
    pub identity: String,
    pub holds: bool,
}

impl TranscriptEntry {
    pub fn new(identity: impl Into<String>, holds: bool) -> Self {
        TranscriptEntry {
            identity: identity.into(),
            holds,
        }
    }
}

/// A section or retraction together with the identities checked on it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplittingCertificate {
    pub kind: CertificateKind,
    pub field: FieldSpec,
    pub inputs: InputHashes,
    pub map: MatrixRecord,
    pub scope: EquivarianceScope,
    /// Checks made while constructing, followed by the from-scratch verification.
    pub transcript: Vec<TranscriptEntry>,
    pub notes: Vec<String>,
}

impl SplittingCertificate {
    pub fn map(&self) -> Result<Matrix> {
        Matrix::try_from(self.map.clone())
    }

    pub fn passed(&self) -> bool {
        self.transcript.iter().all(|e| e.holds)
    }

    /// Re-checks the certificate against `ext` from scratch: input hashes, the
    /// splitting identity, and equivariance for every element in scope.
    pub fn verify(&self, ext: &Extension) -> Result<Vec<TranscriptEntry>> {
        let m = self.map()?;
        let group = ext.group();
        let mut out = vec![TranscriptEntry::new(
            "input hashes match",
            ext.hashes() == self.inputs,
        )];
        let elements: Vec<usize> = match &self.scope {
            EquivarianceScope::LinearOnly => Vec::new(),
            EquivarianceScope::Global => group.elements().collect(),
            EquivarianceScope::Subgroups(list) => {
                let mut all: Vec<usize> = list
                    .iter()
                    .flat_map(|u| u.elements().iter().copied())
                    .collect();
                all.sort_unstable();
                all.dedup();
                all
            }
        };
        match self.kind {
            CertificateKind::Section => {
                let shape = (m.rows(), m.cols()) == (ext.total.dim(), ext.quotient.dim());
                out.push(TranscriptEntry::new(
                    "p∘s = Id",
                    shape && ext.projection.mul(&m).is_identity(),
                ));
                out.push(TranscriptEntry::new(
                    format!("ρ_W(g)∘s = s∘ρ_W″(g) for {} elements", elements.len()),
                    shape && intertwines(&m, &ext.quotient, &ext.total, elements),
                ));
            }
            CertificateKind::Retraction => {
                let shape = (m.rows(), m.cols()) == (ext.sub.dim(), ext.total.dim());
                out.push(TranscriptEntry::new(
                    "r∘i = Id",
                    shape && m.mul(&ext.inclusion).is_identity(),
                ));
                out.push(TranscriptEntry::new(
                    format!("ρ_W′(g)∘r = r∘ρ_W(g) for {} elements", elements.len()),
                    shape && intertwines(&m, &ext.total, &ext.sub, elements),
                ));
            }
        }
        Ok(out)
    }
}
