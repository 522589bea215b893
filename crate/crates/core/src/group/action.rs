use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{FiniteGroup, Subgroup};
use crate::complex::{CellId, Complex, Subcomplex};
use crate::error::{Error, Result};

/// A group acting on the cells of a complex by dimension-preserving poset
/// automorphisms. `table[g * num_cells + c]` is `g·c`.
#[derive(Debug, Clone)]
pub struct CellAction {
    group: Arc<FiniteGroup>,
    complex: Arc<Complex>,
    table: Vec<u32>,
}

impl CellAction {
    /// Action induced by the group's permutations of the vertex set.
    pub fn from_vertex_permutations(
        group: Arc<FiniteGroup>,
        complex: Arc<Complex>,
    ) -> Result<Self> {
        if group.degree() != Some(complex.num_vertices()) && group.order() > 1 {
            return Err(Error::InvalidAction(format!(
                "group permutes {:?} points, complex has {} vertices",
                group.degree(),
                complex.num_vertices()
            )));
        }
        let nc = complex.num_cells();
        let mut table = vec![0u32; group.order() * nc];
        for g in group.elements() {
            for c in 0..nc {
                let image = match group.permutation(g) {
                    Some(p) => {
                        let mut vs: Vec<CellId> = complex
                            .vertices_of(c)
                            .iter()
                            .map(|&v| p[v] as usize)
                            .collect();
                        vs.sort_unstable();
                        complex.cell_with_vertices(&vs).ok_or_else(|| {
                            Error::InvalidAction(format!(
                                "element {g} sends cell {c} outside the complex"
                            ))
                        })?
                    }
                    None => c,
                };
                table[g * nc + c] = image as u32;
            }
        }
        Self::validated(group, complex, table)
    }

    /// Action from explicit cell images: `images[g][c] = g·c`.
    pub fn from_images(
        group: Arc<FiniteGroup>,
        complex: Arc<Complex>,
        images: &[Vec<CellId>],
    ) -> Result<Self> {
        let nc = complex.num_cells();
        if images.len() != group.order() || images.iter().any(|row| row.len() != nc) {
            return Err(Error::InvalidAction(
                "image table has the wrong shape".into(),
            ));
        }
        let table = images.iter().flatten().map(|&c| c as u32).collect();
        Self::validated(group, complex, table)
    }

    fn validated(group: Arc<FiniteGroup>, complex: Arc<Complex>, table: Vec<u32>) -> Result<Self> {
        let a = CellAction {
            group,
            complex,
            table,
        };
        let (g, c) = (&a.group, &a.complex);
        let nc = c.num_cells();
        for e in g.elements() {
            let row = &a.table[e * nc..(e + 1) * nc];
            let mut seen = vec![false; nc];
            for (cell, &img) in row.iter().enumerate() {
                let img = img as usize;
                if img >= nc || std::mem::replace(&mut seen[img], true) {
                    return Err(Error::InvalidAction(format!(
                        "element {e} is not a bijection on cells"
                    )));
                }
                if c.dim_of(img) != c.dim_of(cell) {
                    return Err(Error::InvalidAction(format!(
                        "element {e} changes the dimension of {cell}"
                    )));
                }
            }
            for tau in 0..nc {
                for &sigma in c.facets_of(tau) {
                    if !c.is_facet(a.act(e, sigma), a.act(e, tau)) {
                        return Err(Error::InvalidAction(format!(
                            "element {e} breaks the facet {sigma} < {tau}"
                        )));
                    }
                }
            }
        }
        if (0..nc).any(|cell| a.act(0, cell) != cell) {
            return Err(Error::InvalidAction("identity acts non-trivially".into()));
        }
        for &s in g.generators() {
            for h in g.elements() {
                let sh = g.mul(s, h);
                if (0..nc).any(|cell| a.act(sh, cell) != a.act(s, a.act(h, cell))) {
                    return Err(Error::InvalidAction(format!(
                        "action is not multiplicative at ({s}, {h})"
                    )));
                }
            }
        }
        Ok(a)
    }

    pub fn group(&self) -> &Arc<FiniteGroup> {
        &self.group
    }

    pub fn complex(&self) -> &Arc<Complex> {
        &self.complex
    }

    #[inline]
    pub fn act(&self, g: usize, c: CellId) -> CellId {
        self.table[g * self.complex.num_cells() + c] as CellId
    }

    pub fn act_subcomplex(&self, g: usize, s: &Subcomplex) -> Subcomplex {
        s.map_cells(|c| self.act(g, c))
    }

    /// `G_σ = {g : g·σ = σ}`.
    pub fn stabilizer(&self, sigma: CellId) -> Subgroup {
        self.fixing_all(&[sigma])
    }

    fn fixing_all(&self, cells: &[CellId]) -> Subgroup {
        let elements = self
            .group
            .elements()
            .filter(|&g| cells.iter().all(|&c| self.act(g, c) == c));
        Subgroup::from_elements(&self.group, elements)
            .expect("a pointwise stabilizer is a subgroup")
    }

    /// Elements fixing every cell within distance `n` of the vertex `x`.
    pub fn pointwise_ball_stabilizer(&self, x: CellId, n: usize) -> Result<Subgroup> {
        if !self.complex.is_tree() {
            return Err(Error::NotATree);
        }
        Ok(self.fixing_all(&self.complex.ball_cells(x, n)))
    }

    /// Elements acting trivially on every cell.
    pub fn kernel(&self) -> Subgroup {
        let all: Vec<CellId> = (0..self.complex.num_cells()).collect();
        self.fixing_all(&all)
    }

    /// Orbit of `c` in increasing order.
    pub fn orbit(&self, c: CellId) -> Vec<CellId> {
        let mut o: Vec<CellId> = self.group.elements().map(|g| self.act(g, c)).collect();
        o.sort_unstable();
        o.dedup();
        o
    }

    /// The minimal cell of each orbit, increasing.
    pub fn orbit_representatives(&self) -> Vec<CellId> {
        (0..self.complex.num_cells())
            .filter(|&c| self.orbit(c)[0] == c)
            .collect()
    }

    /// Minimal element index `g` with `g·from = to`.
    pub fn transporter(&self, from: CellId, to: CellId) -> Option<usize> {
        self.group.elements().find(|&g| self.act(g, from) == to)
    }
}

/// Local action allowed at each vertex when generating automorphisms of a rooted tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalAction {
    /// All permutations of isomorphic child subtrees.
    Symmetric,
    /// Only cyclic rotations of isomorphic child subtrees.
    Cyclic,
}

struct RootedTree {
    children: Vec<Vec<CellId>>,
    canon: Vec<usize>,
}

impl RootedTree {
    fn new(c: &Complex, root: CellId) -> Result<Self> {
        let (children, depth) = crate::complex::rooted_children(c, root)?;
        let mut order: Vec<CellId> = (0..c.num_vertices()).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(depth[v]));
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut canon = vec![0; c.num_vertices()];
        for v in order {
            let mut key: Vec<usize> = children[v].iter().map(|&w| canon[w]).collect();
            key.sort_unstable();
            let next = ids.len();
            canon[v] = *ids.entry(key).or_insert(next);
        }
        Ok(RootedTree { children, canon })
    }

    /// Extend `map` with an isomorphism of the subtree at `a` onto the subtree at `b`.
    fn isomorphism(&self, a: CellId, b: CellId, map: &mut [usize]) {
        map[a] = b;
        let sorted = |v: CellId| {
            let mut ch = self.children[v].clone();
            ch.sort_by_key(|&w| (self.canon[w], w));
            ch
        };
        for (x, y) in sorted(a).into_iter().zip(sorted(b)) {
            self.isomorphism(x, y, map);
        }
    }
}

/// Vertex permutations generating the automorphisms of the tree `c` that fix
/// `root`, with the given local action on isomorphic branches.
pub fn rooted_tree_automorphism_generators(
    c: &Complex,
    root: CellId,
    local: LocalAction,
) -> Result<Vec<Vec<usize>>> {
    let t = RootedTree::new(c, root)?;
    let n = c.num_vertices();
    let mut gens = Vec::new();
    for v in 0..n {
        let mut classes: HashMap<usize, Vec<CellId>> = HashMap::new();
        for &w in &t.children[v] {
            classes.entry(t.canon[w]).or_default().push(w);
        }
        let mut classes: Vec<Vec<CellId>> =
            classes.into_values().filter(|cl| cl.len() > 1).collect();
        classes.sort();
        for class in classes {
            let k = class.len();
            let mut cycle: Vec<usize> = (0..n).collect();
            for i in 0..k {
                t.isomorphism(class[i], class[(i + 1) % k], &mut cycle);
            }
            gens.push(cycle);
            if local == LocalAction::Symmetric && k > 2 {
                let mut swap: Vec<usize> = (0..n).collect();
                t.isomorphism(class[0], class[1], &mut swap);
                t.isomorphism(class[1], class[0], &mut swap);
                gens.push(swap);
            }
        }
    }
    Ok(gens)
}

/// The group of rooted automorphisms of a tree as a permutation group on its vertices.
pub fn rooted_tree_automorphism_group(
    c: &Complex,
    root: CellId,
    local: LocalAction,
    order_cap: usize,
) -> Result<FiniteGroup> {
    let gens = rooted_tree_automorphism_generators(c, root, local)?;
    FiniteGroup::from_permutations(c.num_vertices(), &gens, order_cap)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::build_regular_tree_ball;

    fn star() -> (Arc<FiniteGroup>, Arc<Complex>, CellAction) {
        let c = Arc::new(build_regular_tree_ball(2, 1, 100).unwrap());
        let g =
            Arc::new(rooted_tree_automorphism_group(&c, 0, LocalAction::Symmetric, 5000).unwrap());
        let a = CellAction::from_vertex_permutations(g.clone(), c.clone()).unwrap();
        (g, c, a)
    }

    #[test]
    fn star_stabilizers() {
        let (g, _, a) = star();
        assert_eq!(g.order(), 6);
        assert_eq!(a.stabilizer(0).order(), 6);
        assert_eq!(a.stabilizer(1).order(), 2);
        assert_eq!(a.orbit(1), vec![1, 2, 3]);
        assert_eq!(a.orbit_representatives().len(), 3);
        assert_eq!(a.pointwise_ball_stabilizer(0, 0).unwrap().order(), 6);
        assert!(a.pointwise_ball_stabilizer(0, 1).unwrap().is_trivial());
        assert_eq!(a.pointwise_ball_stabilizer(0, 5).unwrap(), a.kernel());
    }

    #[test]
    fn trivial_group_fixes_everything() {
        let c = Arc::new(build_regular_tree_ball(2, 1, 100).unwrap());
        let a = CellAction::from_vertex_permutations(Arc::new(FiniteGroup::trivial()), c).unwrap();
        for cell in 0..7 {
            assert!(a.stabilizer(cell).is_trivial());
        }
    }

    #[test]
    fn automorphism_orders() {
        let cases = [
            (2, 2, LocalAction::Symmetric, 48),
            (3, 1, LocalAction::Symmetric, 24),
            (2, 2, LocalAction::Cyclic, 24),
            (3, 2, LocalAction::Cyclic, 324),
        ];
        for (q, r, local, order) in cases {
            let c = build_regular_tree_ball(q, r, 1000).unwrap();
            let g = rooted_tree_automorphism_group(&c, 0, local, 5000).unwrap();
            assert_eq!(g.order(), order, "q={q} r={r} {local:?}");
        }
    }

    #[test]
    fn rejects_non_automorphisms() {
        let c = Arc::new(build_regular_tree_ball(2, 2, 100).unwrap());
        // Swapping a centre neighbour with a leaf breaks adjacency.
        let mut p: Vec<usize> = (0..10).collect();
        p.swap(1, 4);
        let g = Arc::new(FiniteGroup::from_permutations(10, &[p], 100).unwrap());
        assert!(CellAction::from_vertex_permutations(g, c).is_err());
    }

    #[test]
    fn orbit_stabilizer_counts() {
        let c = Arc::new(build_regular_tree_ball(2, 2, 100).unwrap());
        let g =
            Arc::new(rooted_tree_automorphism_group(&c, 0, LocalAction::Symmetric, 5000).unwrap());
        let a = CellAction::from_vertex_permutations(g.clone(), c.clone()).unwrap();
        for cell in 0..c.num_cells() {
            assert_eq!(a.orbit(cell).len() * a.stabilizer(cell).order(), g.order());
        }
    }
}
