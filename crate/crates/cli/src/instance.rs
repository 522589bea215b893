//! Turning a configuration into a complex, a group action, a representation
//! and a level family.

use std::collections::HashMap;
use std::sync::Arc;

use anyhow::Context;
use cmcsplit::complex::{build_regular_tree_ball, Complex};
use cmcsplit::group::{
    parse_cycles, rooted_tree_automorphism_generators, CellAction, FiniteGroup, LevelFamily,
    LinearRep, Subgroup,
};
use cmcsplit::linalg::Matrix;
use cmcsplit::splitting::random_unimodular;
use serde::{Deserialize, Serialize};

use crate::config::{config_error, CampaignConfig, ComplexSpec, GroupSpec, LevelSpec, RepSpec};

/// Identifying data echoed into every report.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InstanceSummary {
    pub complex_hash: String,
    pub vertices: usize,
    pub cells: usize,
    pub group_order: usize,
    pub rep_dim: usize,
    pub rep_hash: String,
    pub levels: usize,
    pub exhaustive: bool,
}

pub struct Instance {
    pub action: Arc<CellAction>,
    pub rep: Arc<LinearRep>,
    pub family: LevelFamily,
}

fn load_complex(spec: &ComplexSpec, vertex_cap: usize) -> anyhow::Result<Complex> {
    let c = match spec {
        ComplexSpec::Tree { q, r } => build_regular_tree_ball(*q, *r, vertex_cap)
            .map_err(|e| config_error(format!("complex: {e}")))?,
        ComplexSpec::File { path } => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| config_error(format!("complex.path {path}: {e}")))?;
            serde_json::from_str(&text)
                .map_err(|e| config_error(format!("complex.path {path}: {e}")))?
        }
    };
    if c.num_vertices() > vertex_cap {
        return Err(config_error(format!(
            "complex has {} vertices, above caps.vertices",
            c.num_vertices()
        )));
    }
    Ok(c)
}

fn parse_perms(list: &[String], degree: usize, what: &str) -> anyhow::Result<Vec<Vec<usize>>> {
    list.iter()
        .map(|s| parse_cycles(s, degree).map_err(|e| config_error(format!("{what}: {s:?}: {e}"))))
        .collect()
}

fn element_lookup(group: &FiniteGroup) -> HashMap<Vec<u32>, usize> {
    group
        .elements()
        .filter_map(|g| group.permutation(g).map(|p| (p.to_vec(), g)))
        .collect()
}

fn element_of(
    lookup: &HashMap<Vec<u32>, usize>,
    perm: &[usize],
    what: &str,
) -> anyhow::Result<usize> {
    let key: Vec<u32> = perm.iter().map(|&i| i as u32).collect();
    lookup
        .get(&key)
        .copied()
        .ok_or_else(|| config_error(format!("{what}: permutation is not in the group")))
}

impl Instance {
    pub fn build(cfg: &CampaignConfig) -> anyhow::Result<Self> {
        let complex = Arc::new(load_complex(&cfg.complex, cfg.caps.vertices)?);
        let n = complex.num_vertices();
        let generators = match &cfg.group {
            GroupSpec::Automorphisms { local } => {
                rooted_tree_automorphism_generators(&complex, 0, *local)
                    .map_err(|e| config_error(format!("group: {e}")))?
            }
            GroupSpec::Generators { generators } => parse_perms(generators, n, "group.generators")?,
        };
        let group = Arc::new(
            FiniteGroup::from_permutations(n, &generators, cfg.caps.group_order)
                .map_err(|e| config_error(format!("group: {e}")))?,
        );
        let action = Arc::new(
            CellAction::from_vertex_permutations(group.clone(), complex)
                .map_err(|e| config_error(format!("group: {e}")))?,
        );
        let lookup = element_lookup(&group);
        let field = cfg.field;
        let rep = match &cfg.representation {
            RepSpec::Regular => LinearRep::regular(group.clone(), field),
            RepSpec::Permutation { cell_dims } => LinearRep::on_cells(&action, field, cell_dims)
                .map_err(|e| config_error(format!("representation: {e}")))?,
            RepSpec::Explicit { matrices } => {
                if matrices.len() != generators.len() {
                    return Err(config_error(format!(
                        "representation.matrices: {} matrices for {} generators",
                        matrices.len(),
                        generators.len()
                    )));
                }
                let dim = matrices.first().map_or(0, Vec::len);
                let mut gens = Vec::with_capacity(matrices.len());
                for (perm, rows) in generators.iter().zip(matrices) {
                    let entries = rows
                        .iter()
                        .map(|row| {
                            row.iter()
                                .map(|s| field.parse_scalar(s))
                                .collect::<Result<Vec<_>, _>>()
                        })
                        .collect::<Result<Vec<_>, _>>()
                        .map_err(|e| config_error(format!("representation.matrices: {e}")))?;
                    let cols = entries.first().map_or(0, Vec::len);
                    if entries.iter().any(|r| r.len() != cols) {
                        return Err(config_error("representation.matrices: ragged rows"));
                    }
                    let rows = entries.len();
                    let m = Matrix::from_scalars(
                        field,
                        rows,
                        cols,
                        entries.into_iter().flatten().collect(),
                    )
                    .map_err(|e| config_error(format!("representation.matrices: {e}")))?;
                    gens.push((element_of(&lookup, perm, "representation")?, m));
                }
                LinearRep::from_generator_matrices(group.clone(), field, dim, &gens)
                    .map_err(|e| config_error(format!("representation: {e}")))?
            }
        };
        if rep.dim() > cfg.caps.rep_dim {
            return Err(config_error(format!(
                "representation has dimension {}, above caps.rep_dim",
                rep.dim()
            )));
        }
        let family = match &cfg.levels {
            LevelSpec::BallStabilizers {
                base_radius,
                depth: Some(d),
            } => LevelFamily::ball_stabilizers(&action, *base_radius, *d),
            LevelSpec::BallStabilizers {
                base_radius,
                depth: None,
            } => LevelFamily::exhaustive_ball_stabilizers(&action, *base_radius, cfg.caps.levels),
            LevelSpec::Explicit { levels } => {
                let mut subgroups = Vec::with_capacity(levels.len());
                for (i, level) in levels.iter().enumerate() {
                    let mut row = Vec::with_capacity(level.len());
                    for (x, gens) in level.iter().enumerate() {
                        let what = format!("levels.levels[{i}][{x}]");
                        let elems = parse_perms(gens, n, &what)?
                            .iter()
                            .map(|p| element_of(&lookup, p, &what))
                            .collect::<anyhow::Result<Vec<_>>>()?;
                        row.push(Subgroup::generated_by(&group, &elems));
                    }
                    subgroups.push(row);
                }
                LevelFamily::explicit(&action, subgroups)
            }
        }
        .map_err(|e| config_error(format!("levels: {e}")))?;
        Ok(Instance {
            action,
            rep: Arc::new(rep),
            family,
        })
    }

    /// The representation for one trial: conjugated by a random unimodular
    /// matrix when `random_basis` is set.
    pub fn rep_for(&self, cfg: &CampaignConfig, seed: u64) -> anyhow::Result<Arc<LinearRep>> {
        if !cfg.random_basis {
            return Ok(self.rep.clone());
        }
        let p = random_unimodular(cfg.field, self.rep.dim(), seed);
        Ok(Arc::new(
            self.rep.conjugated(&p).context("change of basis")?,
        ))
    }

    pub fn summary(&self) -> InstanceSummary {
        let c = self.action.complex();
        InstanceSummary {
            complex_hash: c.hash().to_string(),
            vertices: c.num_vertices(),
            cells: c.num_cells(),
            group_order: self.action.group().order(),
            rep_dim: self.rep.dim(),
            rep_hash: self.rep.hash(),
            levels: self.family.num_levels(),
            exhaustive: self.family.is_exhaustive(),
        }
    }

    /// All elements for groups of order at most 48, generators otherwise.
    pub fn check_elements(&self) -> Vec<usize> {
        let g = self.action.group();
        if g.order() <= 48 {
            g.elements().collect()
        } else {
            g.generators().to_vec()
        }
    }
}
