use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{CellId, Complex};
use crate::error::{Error, Result};

/// A facet-closed set of cells of a parent complex.
///
/// Text form: `<parent hash>:<sorted cell ids, comma separated>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Subcomplex {
    parent_hash: String,
    cells: Vec<CellId>,
}

impl Subcomplex {
    /// Validates that `cells` are in range and closed under taking facets.
    pub fn new(parent: &Complex, cells: impl IntoIterator<Item = CellId>) -> Result<Self> {
        let set: BTreeSet<CellId> = cells.into_iter().collect();
        if let Some(&c) = set.iter().find(|&&c| c >= parent.num_cells()) {
            return Err(Error::InvalidComplex(format!("cell {c} out of range")));
        }
        for &c in &set {
            if let Some(&f) = parent.facets_of(c).iter().find(|f| !set.contains(f)) {
                return Err(Error::InvalidComplex(format!(
                    "not facet-closed: cell {c} present without its facet {f}"
                )));
            }
        }
        Ok(Subcomplex {
            parent_hash: parent.hash().to_string(),
            cells: set.into_iter().collect(),
        })
    }

    /// Smallest subcomplex containing `cells`.
    pub fn closure(parent: &Complex, cells: impl IntoIterator<Item = CellId>) -> Result<Self> {
        let mut set = BTreeSet::new();
        let mut stack: Vec<CellId> = cells.into_iter().collect();
        while let Some(c) = stack.pop() {
            if c >= parent.num_cells() {
                return Err(Error::InvalidComplex(format!("cell {c} out of range")));
            }
            if set.insert(c) {
                stack.extend_from_slice(parent.facets_of(c));
            }
        }
        Self::new(parent, set)
    }

    pub fn whole(parent: &Complex) -> Self {
        Subcomplex {
            parent_hash: parent.hash().to_string(),
            cells: (0..parent.num_cells()).collect(),
        }
    }

    /// Vertex set plus every cell whose vertices all lie in it.
    pub fn full_on_vertices(parent: &Complex, vertices: &BTreeSet<CellId>) -> Self {
        let cells = (0..parent.num_cells())
            .filter(|&c| parent.vertices_of(c).iter().all(|v| vertices.contains(v)))
            .collect();
        Subcomplex {
            parent_hash: parent.hash().to_string(),
            cells,
        }
    }

    pub fn parent_hash(&self) -> &str {
        &self.parent_hash
    }

    pub fn belongs_to(&self, parent: &Complex) -> bool {
        self.parent_hash == parent.hash()
    }

    /// Sorted cell ids; sorting by id is sorting by `(dim, id)`.
    pub fn cells(&self) -> &[CellId] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn contains(&self, c: CellId) -> bool {
        self.cells.binary_search(&c).is_ok()
    }

    pub fn vertices(&self, parent: &Complex) -> Vec<CellId> {
        self.cells
            .iter()
            .copied()
            .filter(|&c| parent.dim_of(c) == 0)
            .collect()
    }

    /// Image under a cell permutation (e.g. a group element's action).
    pub fn map_cells(&self, f: impl Fn(CellId) -> CellId) -> Self {
        let mut cells: Vec<CellId> = self.cells.iter().map(|&c| f(c)).collect();
        cells.sort_unstable();
        Subcomplex {
            parent_hash: self.parent_hash.clone(),
            cells,
        }
    }

    /// Remove `c` together with every cell having it as a face.
    pub fn without_cell(&self, parent: &Complex, c: CellId) -> Self {
        let mut removed = BTreeSet::new();
        let mut stack = vec![c];
        while let Some(x) = stack.pop() {
            if removed.insert(x) {
                stack.extend_from_slice(parent.cofacets_of(x));
            }
        }
        let cells = self
            .cells
            .iter()
            .copied()
            .filter(|x| !removed.contains(x))
            .collect();
        Subcomplex {
            parent_hash: self.parent_hash.clone(),
            cells,
        }
    }
}

impl fmt::Display for Subcomplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ids: Vec<String> = self.cells.iter().map(|c| c.to_string()).collect();
        write!(f, "{}:{}", self.parent_hash, ids.join(","))
    }
}

impl FromStr for Subcomplex {
    type Err = Error;

    /// Parses the text form; facet closure is only checked by [`Subcomplex::new`].
    fn from_str(s: &str) -> Result<Self> {
        let (hash, rest) = s
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("subcomplex {s:?}: missing ':'")))?;
        let mut cells = Vec::new();
        for tok in rest.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            cells.push(
                tok.parse()
                    .map_err(|_| Error::Parse(format!("bad cell id {tok:?}")))?,
            );
        }
        if cells.windows(2).any(|w: &[CellId]| w[0] >= w[1]) {
            return Err(Error::Parse("cell ids must be strictly increasing".into()));
        }
        Ok(Subcomplex {
            parent_hash: hash.to_string(),
            cells,
        })
    }
}

impl TryFrom<String> for Subcomplex {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<Subcomplex> for String {
    fn from(s: Subcomplex) -> String {
        s.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_regular_tree_ball;

    #[test]
    fn facet_closure_enforced() {
        let c = build_regular_tree_ball(2, 1, 100).unwrap();
        let edge = c.cell_with_vertices(&[0, 1]).unwrap();
        assert!(Subcomplex::new(&c, [edge]).is_err());
        let s = Subcomplex::closure(&c, [edge]).unwrap();
        assert_eq!(s.cells(), &[0, 1, edge]);
    }

    #[test]
    fn text_round_trip() {
        let c = build_regular_tree_ball(2, 1, 100).unwrap();
        let s = Subcomplex::closure(&c, [4, 5]).unwrap();
        let text = s.to_string();
        assert!(text.starts_with(c.hash()));
        let back: Subcomplex = text.parse().unwrap();
        assert_eq!(back, s);
        assert!("abc".parse::<Subcomplex>().is_err());
        assert!("abc:3,1".parse::<Subcomplex>().is_err());
    }

    #[test]
    fn removing_a_vertex_removes_its_edges() {
        let c = build_regular_tree_ball(2, 1, 100).unwrap();
        let whole = Subcomplex::whole(&c);
        let smaller = whole.without_cell(&c, 0);
        assert_eq!(smaller.cells(), &[1, 2, 3]);
        assert!(Subcomplex::new(&c, smaller.cells().iter().copied()).is_ok());
    }
}
