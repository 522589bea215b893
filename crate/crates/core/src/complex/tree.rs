use std::collections::{BTreeSet, VecDeque};

use super::{Cell, CellId, Complex, Subcomplex};
use crate::error::{Error, Result};

/// Default cap on vertex counts for builders and enumerations.
pub const DEFAULT_VERTEX_CAP: usize = 2000;

/// `1 + (q+1)(q^r - 1)/(q - 1)`, or `None` on overflow.
pub fn regular_ball_vertex_count(q: usize, r: usize) -> Option<usize> {
    if q < 2 {
        return None;
    }
    let mut total: usize = 1;
    let mut layer: usize = q + 1;
    for _ in 0..r {
        total = total.checked_add(layer)?;
        layer = layer.checked_mul(q)?;
    }
    Some(total)
}

/// Ball of radius `r` around a vertex of the `(q+1)`-regular tree, indexed
/// breadth-first from the centre (vertex 0).
pub fn build_regular_tree_ball(q: usize, r: usize, vertex_cap: usize) -> Result<Complex> {
    if q < 2 {
        return Err(Error::InvalidComplex(format!(
            "branching must be at least 2, got {q}"
        )));
    }
    let n = regular_ball_vertex_count(q, r)
        .filter(|&n| n <= vertex_cap)
        .ok_or_else(|| {
            Error::SizeLimit(format!("ball (q={q}, r={r}) exceeds {vertex_cap} vertices"))
        })?;
    let mut cells: Vec<Cell> = (0..n)
        .map(|v| Cell {
            dim: 0,
            vertices: vec![v],
        })
        .collect();
    let mut depth = vec![0usize; n];
    let mut next = 1;
    for v in 0..n {
        if depth[v] == r {
            continue;
        }
        let children = if v == 0 { q + 1 } else { q };
        for _ in 0..children {
            depth[next] = depth[v] + 1;
            cells.push(Cell {
                dim: 1,
                vertices: vec![v, next],
            });
            next += 1;
        }
    }
    debug_assert_eq!(next, n);
    Complex::from_cells(cells)
}

/// Children lists and depths of a tree rooted at `root`; children in id order.
pub(crate) fn rooted_children(c: &Complex, root: CellId) -> Result<(Vec<Vec<CellId>>, Vec<usize>)> {
    if !c.is_tree() {
        return Err(Error::NotATree);
    }
    let n = c.num_vertices();
    let mut children = vec![Vec::new(); n];
    let mut depth = vec![usize::MAX; n];
    depth[root] = 0;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        let mut nb = c.neighbours(v);
        nb.sort_unstable();
        for w in nb {
            if depth[w] == usize::MAX {
                depth[w] = depth[v] + 1;
                children[v].push(w);
                queue.push_back(w);
            }
        }
    }
    Ok((children, depth))
}

fn parents_from(c: &Complex, root: CellId) -> Vec<Option<CellId>> {
    let mut parent = vec![None; c.num_vertices()];
    let mut seen = vec![false; c.num_vertices()];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(v) = queue.pop_front() {
        for w in c.neighbours(v) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(v);
                queue.push_back(w);
            }
        }
    }
    parent
}

/// The unique vertex path from `a` to `b` in a tree, endpoints included.
pub fn geodesic(c: &Complex, a: CellId, b: CellId) -> Result<Vec<CellId>> {
    if !c.is_tree() {
        return Err(Error::NotATree);
    }
    let parent = parents_from(c, a);
    let mut path = vec![b];
    let mut v = b;
    while let Some(p) = parent[v] {
        path.push(p);
        v = p;
    }
    path.reverse();
    Ok(path)
}

impl Complex {
    /// Smallest geodesically closed subcomplex containing `vertex_set`.
    pub fn convex_hull_tree(&self, vertex_set: &[CellId]) -> Result<Subcomplex> {
        if !self.is_tree() {
            return Err(Error::NotATree);
        }
        if let Some(&v) = vertex_set.iter().find(|&&v| v >= self.num_vertices()) {
            return Err(Error::InvalidComplex(format!("{v} is not a vertex")));
        }
        let mut hull = BTreeSet::new();
        if let Some(&s0) = vertex_set.first() {
            let parent = parents_from(self, s0);
            for &s in vertex_set {
                let mut v = s;
                while hull.insert(v) {
                    match parent[v] {
                        Some(p) => v = p,
                        None => break,
                    }
                }
            }
        }
        Ok(Subcomplex::full_on_vertices(self, &hull))
    }

    pub fn is_convex(&self, s: &Subcomplex) -> Result<bool> {
        let hull = self.convex_hull_tree(&s.vertices(self))?;
        Ok(hull.cells() == s.cells())
    }

    /// Distinct non-empty convex subcomplexes (subtrees), ordered by vertex
    /// count and then lexicographically by vertex set; truncated at `max_count`.
    pub fn enumerate_convex_subcomplexes(&self, max_count: usize) -> Result<Vec<Subcomplex>> {
        if !self.is_tree() {
            return Err(Error::NotATree);
        }
        if self.num_vertices() > DEFAULT_VERTEX_CAP {
            return Err(Error::SizeLimit(format!(
                "{} vertices exceed the enumeration cap {DEFAULT_VERTEX_CAP}",
                self.num_vertices()
            )));
        }
        let mut out = Vec::new();
        let mut level: BTreeSet<Vec<CellId>> = (0..self.num_vertices()).map(|v| vec![v]).collect();
        let neighbours: Vec<Vec<CellId>> = (0..self.num_vertices())
            .map(|v| self.neighbours(v))
            .collect();
        while !level.is_empty() && out.len() < max_count {
            for vs in &level {
                if out.len() == max_count {
                    break;
                }
                let set: BTreeSet<_> = vs.iter().copied().collect();
                out.push(Subcomplex::full_on_vertices(self, &set));
            }
            let mut next = BTreeSet::new();
            for vs in &level {
                for &v in vs {
                    for &w in &neighbours[v] {
                        if vs.binary_search(&w).is_err() {
                            let mut grown = vs.clone();
                            let pos = grown.binary_search(&w).unwrap_err();
                            grown.insert(pos, w);
                            next.insert(grown);
                        }
                    }
                }
            }
            level = next;
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_counts() {
        let b = build_regular_tree_ball(2, 0, 100).unwrap();
        assert_eq!((b.num_vertices(), b.num_cells() - b.num_vertices()), (1, 0));
        let b = build_regular_tree_ball(2, 1, 100).unwrap();
        assert_eq!((b.num_vertices(), b.num_cells() - b.num_vertices()), (4, 3));
        let b = build_regular_tree_ball(2, 2, 100).unwrap();
        assert_eq!(
            (b.num_vertices(), b.num_cells() - b.num_vertices()),
            (10, 9)
        );
        assert!(matches!(
            build_regular_tree_ball(3, 4, 100),
            Err(Error::SizeLimit(_))
        ));
    }

    #[test]
    fn ball_counts_match_closed_formula() {
        for q in [2usize, 3] {
            for r in 0..=4u32 {
                let b = build_regular_tree_ball(q, r as usize, 10_000).unwrap();
                let expected = 1 + (q + 1) * (q.pow(r) - 1) / (q - 1);
                assert_eq!(b.num_vertices(), expected);
                assert!(b.is_tree());
            }
        }
    }

    #[test]
    fn hull_examples() {
        let b = build_regular_tree_ball(2, 2, 100).unwrap();
        assert_eq!(b.convex_hull_tree(&[5]).unwrap().cells(), &[5]);
        let e = b.cell_with_vertices(&[0, 1]).unwrap();
        assert_eq!(b.convex_hull_tree(&[0, 1]).unwrap().cells(), &[0, 1, e]);
        // 1 and 2 are both neighbours of the centre: distance 2.
        let h = b.convex_hull_tree(&[1, 2]).unwrap();
        assert_eq!(h.vertices(&b), vec![0, 1, 2]);
        assert_eq!(h.len() - 3, 2);
    }

    #[test]
    fn convexity_examples() {
        let b = build_regular_tree_ball(2, 2, 100).unwrap();
        assert!(b.is_convex(&Subcomplex::new(&b, [3]).unwrap()).unwrap());
        assert!(!b.is_convex(&Subcomplex::new(&b, [1, 2]).unwrap()).unwrap());
        assert!(b.is_convex(&Subcomplex::whole(&b)).unwrap());
        let tri = Complex::simplicial(3, &[vec![0, 1, 2]]).unwrap();
        assert!(matches!(
            tri.is_convex(&Subcomplex::whole(&tri)),
            Err(Error::NotATree)
        ));
    }

    #[test]
    fn enumeration_examples() {
        let path = Complex::simplicial(2, &[vec![0, 1]]).unwrap();
        let subs = path.enumerate_convex_subcomplexes(100).unwrap();
        let cells: Vec<_> = subs.iter().map(|s| s.cells().to_vec()).collect();
        assert_eq!(cells, vec![vec![0], vec![1], vec![0, 1, 2]]);

        let point = build_regular_tree_ball(2, 0, 10).unwrap();
        assert_eq!(point.enumerate_convex_subcomplexes(10).unwrap().len(), 1);
    }

    /// Exhaustive oracle: every vertex subset whose full subcomplex is convex.
    fn brute_force_convex(c: &Complex) -> BTreeSet<Vec<CellId>> {
        let n = c.num_vertices();
        let mut out = BTreeSet::new();
        for mask in 1u32..(1 << n) {
            let vs: BTreeSet<CellId> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let s = Subcomplex::full_on_vertices(c, &vs);
            if c.is_convex(&s).unwrap() {
                out.insert(s.cells().to_vec());
            }
        }
        out
    }

    #[test]
    fn enumeration_matches_brute_force_on_small_ball() {
        let b = build_regular_tree_ball(2, 1, 100).unwrap();
        let listed: BTreeSet<_> = b
            .enumerate_convex_subcomplexes(100)
            .unwrap()
            .iter()
            .map(|s| s.cells().to_vec())
            .collect();
        let oracle = brute_force_convex(&b);
        assert_eq!(listed, oracle);
        assert_eq!(listed.len(), 11);
        for v in 0..4 {
            assert!(listed.contains(&vec![v]));
        }
        assert!(listed.contains(&Subcomplex::whole(&b).cells().to_vec()));

        let b = build_regular_tree_ball(2, 2, 100).unwrap();
        let listed: BTreeSet<_> = b
            .enumerate_convex_subcomplexes(10_000)
            .unwrap()
            .iter()
            .map(|s| s.cells().to_vec())
            .collect();
        assert_eq!(listed, brute_force_convex(&b));
    }

    #[test]
    fn enumeration_truncates_deterministically() {
        let b = build_regular_tree_ball(3, 2, 100).unwrap();
        let a = b.enumerate_convex_subcomplexes(50).unwrap();
        let c = b.enumerate_convex_subcomplexes(50).unwrap();
        assert_eq!(a.len(), 50);
        assert_eq!(a, c);
    }
}
