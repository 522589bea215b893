//! Replayable support-projection fixtures and their greedy shrinking.

use std::path::Path;
use std::sync::Arc;

use anyhow::Context;
use cmcsplit::complex::{Complex, Subcomplex};
use cmcsplit::idempotents::{IdempotentSystem, SystemRecord, VerificationRecord};
use serde::{Deserialize, Serialize};

use crate::config::config_error;

pub const FIXTURE_VERSION: u32 = 1;

/// A subcomplex together with everything needed to recheck the support
/// projection identities on it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Fixture {
    pub version: u32,
    pub complex: Complex,
    pub system: SystemRecord,
    pub subcomplex: Subcomplex,
    pub convex: Option<bool>,
    /// Identities that failed when the fixture was written.
    pub failing: Vec<String>,
}

/// How an archived fixture is listed in a report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureRecord {
    pub trial: usize,
    pub file: String,
    pub minimized_file: String,
    pub original_cells: usize,
    pub minimized_cells: usize,
    pub minimized_subcomplex: String,
    /// Cells of the convex hull missing from the minimized subcomplex.
    pub gap_cells: Vec<usize>,
    pub still_fails: bool,
    pub replays: bool,
}

pub fn failing_identities(rec: &VerificationRecord) -> Vec<String> {
    let mut out = Vec::new();
    if !rec.idempotent {
        out.push("idempotent".to_string());
    }
    if !rec.image_identity {
        out.push("image".to_string());
    }
    if !rec.kernel_identity {
        out.push("kernel".to_string());
    }
    out
}

/// A fixture's system, rebuilt once so that many subcomplexes can be checked.
pub struct Replayer {
    pub complex: Arc<Complex>,
    pub system: IdempotentSystem,
}

impl Replayer {
    pub fn new(f: &Fixture) -> anyhow::Result<Self> {
        let complex = Arc::new(f.complex.clone());
        let system = IdempotentSystem::from_record(complex.clone(), f.system.clone())
            .and_then(IdempotentSystem::derive_cell_idempotents)
            .context("rebuilding the fixture's idempotent system")?;
        Ok(Replayer { complex, system })
    }

    pub fn failing(&self, s: &Subcomplex) -> anyhow::Result<Vec<String>> {
        Ok(failing_identities(
            &self.system.verify_support_projection(s)?,
        ))
    }
}

impl Fixture {
    pub fn new(system: &IdempotentSystem, subcomplex: Subcomplex) -> anyhow::Result<Self> {
        let rec = system.verify_support_projection(&subcomplex)?;
        Ok(Fixture {
            version: FIXTURE_VERSION,
            complex: (**system.complex()).clone(),
            system: system.record(),
            subcomplex,
            convex: rec.convex,
            failing: failing_identities(&rec),
        })
    }

    pub fn fails(&self) -> bool {
        !self.failing.is_empty()
    }

    /// Recomputes the identities from the stored data and compares with `failing`.
    pub fn replays(&self) -> anyhow::Result<bool> {
        let r = Replayer::new(self)?;
        Ok(r.failing(&self.subcomplex)? == self.failing)
    }

    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| config_error(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| config_error(format!("{}: {e}", path.display())))
    }

    pub fn save(&self, path: &Path) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(self)?;
        text.push('\n');
        std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
    }

    /// Cells of the convex hull of the subcomplex's vertices that the
    /// subcomplex lacks (trees only; empty otherwise).
    pub fn gap_cells(&self) -> Vec<usize> {
        let vs = self.subcomplex.vertices(&self.complex);
        match self.complex.convex_hull_tree(&vs) {
            Ok(h) => h
                .cells()
                .iter()
                .copied()
                .filter(|&c| !self.subcomplex.contains(c))
                .collect(),
            Err(_) => Vec::new(),
        }
    }
}

/// Greedily drops cells (with their cofaces) while some identity still
/// fails. A passing fixture is returned unchanged; a minimal one is a fixpoint
/// after a single pass.
pub fn shrink(f: &Fixture) -> anyhow::Result<Fixture> {
    if !f.fails() {
        return Ok(f.clone());
    }
    let r = Replayer::new(f)?;
    let mut current = f.subcomplex.clone();
    let mut failing = f.failing.clone();
    'outer: loop {
        for &c in current.cells().iter().rev() {
            let candidate = current.without_cell(&r.complex, c);
            if candidate.is_empty() {
                continue;
            }
            let now = r.failing(&candidate)?;
            if !now.is_empty() {
                current = candidate;
                failing = now;
                continue 'outer;
            }
        }
        break;
    }
    let rec = r.system.verify_support_projection(&current)?;
    Ok(Fixture {
        subcomplex: current,
        convex: rec.convex,
        failing,
        ..f.clone()
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use cmcsplit::complex::build_regular_tree_ball;
    use cmcsplit::linalg::{FieldSpec, Matrix};
    use std::collections::BTreeSet;

    fn identity_system() -> IdempotentSystem {
        let c = Arc::new(build_regular_tree_ball(2, 2, 100).unwrap());
        let n = c.num_vertices();
        let q = FieldSpec::Rationals;
        IdempotentSystem::new(c, q, 2, vec![Matrix::identity(q, 2); n])
            .unwrap()
            .derive_cell_idempotents()
            .unwrap()
    }

    #[test]
    fn passing_fixture_is_unchanged() {
        let sys = identity_system();
        let s = Subcomplex::full_on_vertices(sys.complex(), &BTreeSet::from([0, 1]));
        let f = Fixture::new(&sys, s).unwrap();
        assert!(!f.fails());
        assert_eq!(shrink(&f).unwrap(), f);
    }

    #[test]
    fn shrinks_to_the_geodesic_gap() {
        let sys = identity_system();
        let c = sys.complex().clone();
        // Two separate edges hanging off different children of the centre.
        let leaf_a = c.neighbours(1).into_iter().find(|&v| v > 3).unwrap();
        let leaf_b = c.neighbours(2).into_iter().find(|&v| v > 3).unwrap();
        let s = Subcomplex::full_on_vertices(&c, &BTreeSet::from([1, leaf_a, 2, leaf_b]));
        let f = Fixture::new(&sys, s).unwrap();
        assert_eq!(f.convex, Some(false));
        assert!(f.fails());
        let m = shrink(&f).unwrap();
        assert!(m.fails() && m.replays().unwrap());
        // Oracle: with e_x = Id everywhere the alternating sum is χ(Σ)·Id, so
        // a minimal failing subcomplex is two disjoint vertices. Removing cells
        // from the back keeps the two lowest ids, 1 and 2, whose geodesic runs
        // through the centre.
        assert_eq!(m.subcomplex.cells(), &[1, 2]);
        let e1 = c.cell_with_vertices(&[0, 1]).unwrap();
        let e2 = c.cell_with_vertices(&[0, 2]).unwrap();
        let mut gap = vec![0, e1, e2];
        gap.sort();
        assert_eq!(m.gap_cells(), gap);
        assert_eq!(shrink(&m).unwrap(), m);
    }

    #[test]
    fn json_round_trip() {
        let sys = identity_system();
        let s = Subcomplex::full_on_vertices(sys.complex(), &BTreeSet::from([1, 2]));
        let f = Fixture::new(&sys, s).unwrap();
        let back: Fixture = serde_json::from_str(&serde_json::to_string(&f).unwrap()).unwrap();
        assert_eq!(back, f);
        assert!(back.replays().unwrap());
    }
}
