//! Finite cell complexes standing in for finite convex pieces of a building.
//!
//! Cells are indexed so that all vertices come first (ids `0..num_vertices`),
//! followed by higher cells in order of `(dim, vertex set)`. A vertex's id is
//! both its cell id and its vertex label.

mod subcomplex;
mod tree;

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

pub use subcomplex::Subcomplex;
pub(crate) use tree::rooted_children;
pub use tree::{build_regular_tree_ball, geodesic, regular_ball_vertex_count, DEFAULT_VERTEX_CAP};

use crate::error::{Error, Result};
use crate::hashing::short_hash;

pub type CellId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub dim: usize,
    /// Sorted vertex ids.
    pub vertices: Vec<CellId>,
}

/// Structured text form of a complex.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexRecord {
    pub cells: Vec<Cell>,
    /// `(σ, τ)` with `σ` a facet of `τ`.
    pub facets: Vec<(CellId, CellId)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(try_from = "ComplexRecord", into = "ComplexRecord")]
pub struct Complex {
    cells: Vec<Cell>,
    num_vertices: usize,
    facets: Vec<Vec<CellId>>,
    cofacets: Vec<Vec<CellId>>,
    lookup: HashMap<Vec<CellId>, CellId>,
    hash: String,
}

impl PartialEq for Complex {
    fn eq(&self, other: &Self) -> bool {
        self.cells == other.cells
    }
}

impl Eq for Complex {}

impl Complex {
    /// Build from an explicit cell list. Vertices must come first with
    /// `vertices == [id]`, cells must be sorted by dimension, and vertex sets
    /// must be distinct.
    pub fn from_cells(cells: Vec<Cell>) -> Result<Self> {
        let num_vertices = cells.iter().take_while(|c| c.dim == 0).count();
        let mut lookup = HashMap::with_capacity(cells.len());
        for (id, cell) in cells.iter().enumerate() {
            let bad = |why: &str| Error::InvalidComplex(format!("cell {id}: {why}"));
            if id < num_vertices {
                if cell.vertices != [id] {
                    return Err(bad("a vertex must have vertex set {itself}"));
                }
            } else {
                if cell.dim == 0 {
                    return Err(bad("vertices must precede higher cells"));
                }
                if cell.dim < cells[id - 1].dim {
                    return Err(bad("cells must be sorted by dimension"));
                }
                if cell.vertices.len() < cell.dim + 1 {
                    return Err(bad("a d-cell needs at least d+1 vertices"));
                }
                if cell.vertices.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(bad("vertex set must be sorted and distinct"));
                }
                if cell.vertices.iter().any(|&v| v >= num_vertices) {
                    return Err(bad("vertex out of range"));
                }
            }
            if lookup.insert(cell.vertices.clone(), id).is_some() {
                return Err(bad("duplicate vertex set"));
            }
        }

        let mut facets = vec![Vec::new(); cells.len()];
        let mut cofacets = vec![Vec::new(); cells.len()];
        for (tau, cell) in cells.iter().enumerate().skip(num_vertices) {
            let vs: BTreeSet<_> = cell.vertices.iter().copied().collect();
            for (sigma, cand) in cells.iter().enumerate() {
                if cand.dim + 1 == cell.dim && cand.vertices.iter().all(|v| vs.contains(v)) {
                    facets[tau].push(sigma);
                    cofacets[sigma].push(tau);
                }
            }
            if facets[tau].len() < 2 {
                return Err(Error::InvalidComplex(format!(
                    "cell {tau} is missing facets"
                )));
            }
            // Simplicial cells must carry their full boundary.
            if cell.vertices.len() == cell.dim + 1 && facets[tau].len() != cell.dim + 1 {
                return Err(Error::InvalidComplex(format!(
                    "simplex {tau} is missing facets"
                )));
            }
        }

        let mut c = Complex {
            cells,
            num_vertices,
            facets,
            cofacets,
            lookup,
            hash: String::new(),
        };
        c.hash = short_hash(&c.record());
        Ok(c)
    }

    /// The simplicial complex generated by `simplices` (closed under faces).
    pub fn simplicial(num_vertices: usize, simplices: &[Vec<usize>]) -> Result<Self> {
        let mut sets: BTreeSet<(usize, Vec<usize>)> = BTreeSet::new();
        for s in simplices {
            let mut s = s.clone();
            s.sort_unstable();
            s.dedup();
            if s.iter().any(|&v| v >= num_vertices) {
                return Err(Error::InvalidComplex("simplex vertex out of range".into()));
            }
            let k = s.len();
            if k > 20 {
                return Err(Error::SizeLimit("simplex dimension above 19".into()));
            }
            for mask in 1u32..(1 << k) {
                let face: Vec<usize> = (0..k)
                    .filter(|i| mask >> i & 1 == 1)
                    .map(|i| s[i])
                    .collect();
                if face.len() > 1 {
                    sets.insert((face.len() - 1, face));
                }
            }
        }
        let mut cells: Vec<Cell> = (0..num_vertices)
            .map(|v| Cell {
                dim: 0,
                vertices: vec![v],
            })
            .collect();
        cells.extend(
            sets.into_iter()
                .map(|(dim, vertices)| Cell { dim, vertices }),
        );
        Self::from_cells(cells)
    }

    pub fn record(&self) -> ComplexRecord {
        let mut facets = Vec::new();
        for (tau, fs) in self.facets.iter().enumerate() {
            for &sigma in fs {
                facets.push((sigma, tau));
            }
        }
        ComplexRecord {
            cells: self.cells.clone(),
            facets,
        }
    }

    /// Short content hash identifying this complex in fixtures and reports.
    pub fn hash(&self) -> &str {
        &self.hash
    }

    pub fn num_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn cell(&self, id: CellId) -> &Cell {
        &self.cells[id]
    }

    pub fn dim_of(&self, id: CellId) -> usize {
        self.cells[id].dim
    }

    pub fn vertices_of(&self, id: CellId) -> &[CellId] {
        &self.cells[id].vertices
    }

    pub fn max_dim(&self) -> usize {
        self.cells.iter().map(|c| c.dim).max().unwrap_or(0)
    }

    pub fn cells_of_dim(&self, d: usize) -> impl Iterator<Item = CellId> + '_ {
        (0..self.cells.len()).filter(move |&i| self.cells[i].dim == d)
    }

    /// Codimension-one faces.
    pub fn facets_of(&self, id: CellId) -> &[CellId] {
        &self.facets[id]
    }

    pub fn cofacets_of(&self, id: CellId) -> &[CellId] {
        &self.cofacets[id]
    }

    /// `σ ≺ τ`: σ is a facet of τ.
    pub fn is_facet(&self, sigma: CellId, tau: CellId) -> bool {
        self.facets[tau].contains(&sigma)
    }

    pub fn cell_with_vertices(&self, vertices: &[CellId]) -> Option<CellId> {
        self.lookup.get(vertices).copied()
    }

    /// Edge adjacency between vertices.
    pub fn neighbours(&self, v: CellId) -> Vec<CellId> {
        self.cofacets[v]
            .iter()
            .filter(|&&e| self.cells[e].dim == 1)
            .flat_map(|&e| self.cells[e].vertices.iter().copied())
            .filter(|&w| w != v)
            .collect()
    }

    /// Graph distances from `source` along edges; `None` for unreachable vertices.
    pub fn distances_from(&self, source: CellId) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.num_vertices];
        let mut queue = std::collections::VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let d = dist[v].unwrap();
            for w in self.neighbours(v) {
                if dist[w].is_none() {
                    dist[w] = Some(d + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Cells all of whose vertices lie within distance `radius` of `x`.
    pub fn ball_cells(&self, x: CellId, radius: usize) -> Vec<CellId> {
        let dist = self.distances_from(x);
        (0..self.cells.len())
            .filter(|&c| {
                self.cells[c]
                    .vertices
                    .iter()
                    .all(|&v| dist[v].is_some_and(|d| d <= radius))
            })
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        self.num_vertices == 0 || self.distances_from(0).iter().all(Option::is_some)
    }

    /// One-dimensional, connected and acyclic.
    pub fn is_tree(&self) -> bool {
        self.num_vertices > 0
            && self.max_dim() <= 1
            && self.is_connected()
            && self.cells.len() == 2 * self.num_vertices - 1
    }
}

impl From<Complex> for ComplexRecord {
    fn from(c: Complex) -> Self {
        c.record()
    }
}

impl TryFrom<ComplexRecord> for Complex {
    type Error = Error;

    fn try_from(r: ComplexRecord) -> Result<Self> {
        let c = Complex::from_cells(r.cells)?;
        let mut given = r.facets.clone();
        given.sort_unstable();
        let mut computed = c.record().facets;
        computed.sort_unstable();
        if given != computed {
            return Err(Error::InvalidComplex(
                "facet pairs disagree with the cell list".into(),
            ));
        }
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_is_closed_under_faces() {
        let c = Complex::simplicial(3, &[vec![0, 1, 2]]).unwrap();
        assert_eq!(c.num_cells(), 7);
        assert_eq!(c.max_dim(), 2);
        let tri = c.cell_with_vertices(&[0, 1, 2]).unwrap();
        assert_eq!(c.facets_of(tri).len(), 3);
        for &f in c.facets_of(tri) {
            assert!(c.dim_of(f) < c.dim_of(tri));
            assert!(c
                .vertices_of(f)
                .iter()
                .all(|v| c.vertices_of(tri).contains(v)));
        }
        assert!(!c.is_tree());
    }

    #[test]
    fn rejects_malformed_cells() {
        let cells = vec![
            Cell {
                dim: 0,
                vertices: vec![0],
            },
            Cell {
                dim: 0,
                vertices: vec![1],
            },
            Cell {
                dim: 1,
                vertices: vec![0, 1],
            },
            Cell {
                dim: 1,
                vertices: vec![0, 1],
            },
        ];
        assert!(Complex::from_cells(cells).is_err());
        let cells = vec![Cell {
            dim: 0,
            vertices: vec![1],
        }];
        assert!(Complex::from_cells(cells).is_err());
    }

    #[test]
    fn record_round_trip() {
        let c = Complex::simplicial(4, &[vec![0, 1, 2], vec![2, 3]]).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        let back: Complex = serde_json::from_str(&s).unwrap();
        assert_eq!(back, c);
        assert_eq!(back.hash(), c.hash());
        let mut rec = c.record();
        rec.facets.pop();
        assert!(Complex::try_from(rec).is_err());
    }
}
