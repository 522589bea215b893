use std::collections::{HashMap, HashSet, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default cap on group orders.
pub const DEFAULT_ORDER_CAP: usize = 5000;

/// A finite group stored by its multiplication table. Element 0 is the identity.
#[derive(Debug, Clone)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<u16>,
    inverse: Vec<usize>,
    generators: Vec<usize>,
    /// `words[g] = Some((s, h))` with `g = generators[s] * h`; `None` for the identity.
    words: Vec<Option<(usize, usize)>>,
    /// Permutation images when built from permutations: `perms[g][i] = g(i)`.
    perms: Option<Vec<Vec<u32>>>,
}

/// Parse cycle notation such as `(0 1 2)(3 4)` on `0..degree`. `()` is the identity.
pub fn parse_cycles(s: &str, degree: usize) -> Result<Vec<usize>> {
    let mut perm: Vec<usize> = (0..degree).collect();
    let mut seen = vec![false; degree];
    let mut rest = s.trim();
    let err = |why: &str| Error::Parse(format!("cycle notation {s:?}: {why}"));
    while !rest.is_empty() {
        let body_start = rest.strip_prefix('(').ok_or_else(|| err("expected '('"))?;
        let close = body_start.find(')').ok_or_else(|| err("unclosed cycle"))?;
        let body = &body_start[..close];
        rest = body_start[close + 1..].trim_start();
        let points = body
            .split(|c: char| c == ',' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<usize>().map_err(|_| err("non-numeric point")))
            .collect::<Result<Vec<_>>>()?;
        for &p in &points {
            if p >= degree {
                return Err(err("point out of range"));
            }
            if std::mem::replace(&mut seen[p], true) {
                return Err(err("point repeated"));
            }
        }
        for (i, &p) in points.iter().enumerate() {
            perm[p] = points[(i + 1) % points.len()];
        }
    }
    Ok(perm)
}

/// Cycle notation with fixed points omitted; `()` for the identity.
pub fn format_cycles(perm: &[usize]) -> String {
    let mut seen = vec![false; perm.len()];
    let mut out = String::new();
    for start in 0..perm.len() {
        if seen[start] || perm[start] == start {
            continue;
        }
        let mut cycle = vec![start];
        seen[start] = true;
        let mut v = perm[start];
        while v != start {
            seen[v] = true;
            cycle.push(v);
            v = perm[v];
        }
        let body: Vec<String> = cycle.iter().map(|x| x.to_string()).collect();
        out.push('(');
        out.push_str(&body.join(" "));
        out.push(')');
    }
    if out.is_empty() {
        out.push_str("()");
    }
    out
}

fn check_permutation(p: &[usize], degree: usize) -> Result<()> {
    if p.len() != degree {
        return Err(Error::InvalidGroup(format!(
            "permutation of length {} on {degree} points",
            p.len()
        )));
    }
    let mut seen = vec![false; degree];
    for &x in p {
        if x >= degree || std::mem::replace(&mut seen[x], true) {
            return Err(Error::InvalidGroup("generator is not a permutation".into()));
        }
    }
    Ok(())
}

impl FiniteGroup {
    pub fn trivial() -> Self {
        FiniteGroup {
            order: 1,
            table: vec![0],
            inverse: vec![0],
            generators: vec![],
            words: vec![None],
            perms: None,
        }
    }

    /// The group generated by permutations of `0..degree`; `(g h)(i) = g(h(i))`.
    pub fn from_permutations(degree: usize, generators: &[Vec<usize>], cap: usize) -> Result<Self> {
        let cap = cap.min(u16::MAX as usize);
        for g in generators {
            check_permutation(g, degree)?;
        }
        let gens: Vec<Vec<u32>> = generators
            .iter()
            .filter(|g| g.iter().enumerate().any(|(i, &x)| i != x))
            .map(|g| g.iter().map(|&x| x as u32).collect())
            .collect();
        let identity: Vec<u32> = (0..degree as u32).collect();
        let mut perms = vec![identity.clone()];
        let mut index: HashMap<Vec<u32>, usize> = HashMap::from([(identity, 0)]);
        let mut words = vec![None];
        let mut queue = VecDeque::from([0usize]);
        while let Some(h) = queue.pop_front() {
            for (s, gen) in gens.iter().enumerate() {
                let prod: Vec<u32> = perms[h].iter().map(|&i| gen[i as usize]).collect();
                if !index.contains_key(&prod) {
                    if perms.len() == cap {
                        return Err(Error::SizeLimit(format!("group order exceeds {cap}")));
                    }
                    index.insert(prod.clone(), perms.len());
                    queue.push_back(perms.len());
                    perms.push(prod);
                    words.push(Some((s, h)));
                }
            }
        }
        let n = perms.len();
        let gen_elems: Vec<usize> = gens.iter().map(|g| index[g]).collect();
        // Left multiplication by each generator, then rows by word recursion.
        let gen_rows: Vec<Vec<u16>> = gens
            .iter()
            .map(|gen| {
                perms
                    .iter()
                    .map(|p| {
                        let prod: Vec<u32> = p.iter().map(|&i| gen[i as usize]).collect();
                        index[&prod] as u16
                    })
                    .collect()
            })
            .collect();
        let mut table = vec![0u16; n * n];
        for h in 0..n {
            table[h] = h as u16;
        }
        for g in 1..n {
            let (s, prev) = words[g].expect("non-identity has a word");
            for h in 0..n {
                let ph = table[prev * n + h] as usize;
                table[g * n + h] = gen_rows[s][ph];
            }
        }
        let inverse = Self::inverses(&table, n)?;
        let mut group = FiniteGroup {
            order: n,
            table,
            inverse,
            generators: gen_elems,
            words,
            perms: Some(perms),
        };
        group.generators.dedup();
        Ok(group)
    }

    /// A group from an explicit multiplication table; element 0 must be the
    /// identity. Associativity is spot-checked on random triples.
    pub fn from_table(rows: &[Vec<usize>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 || n > u16::MAX as usize {
            return Err(Error::InvalidGroup(format!("table of order {n}")));
        }
        let mut table = vec![0u16; n * n];
        for (g, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidGroup("ragged multiplication table".into()));
            }
            let mut seen = vec![false; n];
            for (h, &x) in row.iter().enumerate() {
                if x >= n || std::mem::replace(&mut seen[x], true) {
                    return Err(Error::InvalidGroup(format!("row {g} is not a permutation")));
                }
                table[g * n + h] = x as u16;
            }
        }
        if (0..n).any(|h| table[h] as usize != h || table[h * n] as usize != h) {
            return Err(Error::InvalidGroup("element 0 is not the identity".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let samples = (n * n * n).min(4096);
        for _ in 0..samples {
            let (a, b, c) = (
                rng.gen_range(0..n),
                rng.gen_range(0..n),
                rng.gen_range(0..n),
            );
            let ab = table[a * n + b] as usize;
            let bc = table[b * n + c] as usize;
            if table[ab * n + c] != table[a * n + bc] {
                return Err(Error::InvalidGroup(format!(
                    "associativity fails on ({a}, {b}, {c})"
                )));
            }
        }
        let inverse = Self::inverses(&table, n)?;
        let mut group = FiniteGroup {
            order: n,
            table,
            inverse,
            generators: vec![],
            words: vec![None; n],
            perms: None,
        };
        // Greedy generating set, then breadth-first words over it.
        let mut gens = Vec::new();
        let mut span = Subgroup::trivial();
        for g in 0..n {
            if !span.contains(g) {
                gens.push(g);
                span = Subgroup::generated_by(&group, &gens);
            }
        }
        group.set_generators(gens);
        Ok(group)
    }

    fn inverses(table: &[u16], n: usize) -> Result<Vec<usize>> {
        (0..n)
            .map(|g| {
                (0..n)
                    .find(|&h| table[g * n + h] == 0 && table[h * n + g] == 0)
                    .ok_or_else(|| Error::InvalidGroup(format!("element {g} has no inverse")))
            })
            .collect()
    }

    fn set_generators(&mut self, gens: Vec<usize>) {
        let n = self.order;
        let mut words = vec![None; n];
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut queue = VecDeque::from([0usize]);
        while let Some(h) = queue.pop_front() {
            for (s, &g) in gens.iter().enumerate() {
                let p = self.mul(g, h);
                if !seen[p] {
                    seen[p] = true;
                    words[p] = Some((s, h));
                    queue.push_back(p);
                }
            }
        }
        self.generators = gens;
        self.words = words;
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b] as usize
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn conj(&self, g: usize, u: usize) -> usize {
        self.mul(self.mul(g, u), self.inv(g))
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    /// `Some((s, h))` with `g = generators()[s] * h`.
    pub fn word_step(&self, g: usize) -> Option<(usize, usize)> {
        self.words[g]
    }

    pub fn permutation(&self, g: usize) -> Option<&[u32]> {
        self.perms.as_ref().map(|p| p[g].as_slice())
    }

    pub fn degree(&self) -> Option<usize> {
        self.perms.as_ref().map(|p| p[0].len())
    }

    /// The full multiplication table as rows.
    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        (0..self.order)
            .map(|g| (0..self.order).map(|h| self.mul(g, h)).collect())
            .collect()
    }
}

/// A subgroup given by its sorted element indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Subgroup {
    elements: Vec<usize>,
}

impl Subgroup {
    pub fn trivial() -> Self {
        Subgroup { elements: vec![0] }
    }

    pub fn whole(group: &FiniteGroup) -> Self {
        Subgroup {
            elements: group.elements().collect(),
        }
    }

    /// Closure of `gens` under multiplication.
    pub fn generated_by(group: &FiniteGroup, gens: &[usize]) -> Self {
        let mut seen = vec![false; group.order()];
        seen[0] = true;
        let mut elements = vec![0];
        let mut i = 0;
        while i < elements.len() {
            let h = elements[i];
            for &g in gens {
                let p = group.mul(g, h);
                if !seen[p] {
                    seen[p] = true;
                    elements.push(p);
                }
            }
            i += 1;
        }
        elements.sort_unstable();
        Subgroup { elements }
    }

    /// Validates closure, identity and inverses.
    pub fn from_elements(
        group: &FiniteGroup,
        elements: impl IntoIterator<Item = usize>,
    ) -> Result<Self> {
        let mut elements: Vec<usize> = elements.into_iter().collect();
        elements.sort_unstable();
        elements.dedup();
        if elements.iter().any(|&g| g >= group.order()) {
            return Err(Error::InvalidGroup("subgroup element out of range".into()));
        }
        let s = Subgroup { elements };
        if !s.contains(0) {
            return Err(Error::InvalidGroup("subset lacks the identity".into()));
        }
        for &a in &s.elements {
            if !s.contains(group.inv(a)) {
                return Err(Error::InvalidGroup(format!(
                    "subset not closed under inverses at {a}"
                )));
            }
            for &b in &s.elements {
                if !s.contains(group.mul(a, b)) {
                    return Err(Error::InvalidGroup(format!(
                        "subset not closed under products ({a}, {b})"
                    )));
                }
            }
        }
        Ok(s)
    }

    pub fn elements(&self) -> &[usize] {
        &self.elements
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn contains(&self, g: usize) -> bool {
        self.elements.binary_search(&g).is_ok()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.elements.iter().all(|&g| other.contains(g))
    }

    /// `g U g⁻¹`.
    pub fn conjugate(&self, group: &FiniteGroup, g: usize) -> Subgroup {
        let mut elements: Vec<usize> = self.elements.iter().map(|&u| group.conj(g, u)).collect();
        elements.sort_unstable();
        Subgroup { elements }
    }

    pub fn is_normal_in(&self, group: &FiniteGroup, other: &Subgroup) -> bool {
        self.is_subgroup_of(other)
            && other
                .elements
                .iter()
                .all(|&g| &self.conjugate(group, g) == self)
    }

    pub fn intersect(&self, other: &Subgroup) -> Subgroup {
        Subgroup {
            elements: self
                .elements
                .iter()
                .copied()
                .filter(|&g| other.contains(g))
                .collect(),
        }
    }

    /// Representatives of the left cosets `gU` in `over`, each the minimal
    /// element of its coset, in increasing order.
    pub fn left_coset_representatives(&self, group: &FiniteGroup, over: &Subgroup) -> Vec<usize> {
        let mut covered = HashSet::new();
        let mut reps = Vec::new();
        for &g in &over.elements {
            if covered.contains(&g) {
                continue;
            }
            reps.push(g);
            for &u in &self.elements {
                covered.insert(group.mul(g, u));
            }
        }
        reps
    }
}

/// Every subgroup of `group`, sorted by order then elements; `None` past `cap`.
pub fn all_subgroups(group: &FiniteGroup, cap: usize) -> Option<Vec<Subgroup>> {
    let mut found: HashSet<Subgroup> = HashSet::new();
    let mut queue: VecDeque<(Subgroup, Vec<usize>)> = VecDeque::new();
    let trivial = Subgroup::trivial();
    found.insert(trivial.clone());
    queue.push_back((trivial, vec![]));
    while let Some((h, gens)) = queue.pop_front() {
        for g in group.elements() {
            if h.contains(g) {
                continue;
            }
            let mut joined = gens.clone();
            joined.push(g);
            let k = Subgroup::generated_by(group, &joined);
            if !found.contains(&k) {
                if found.len() >= cap {
                    return None;
                }
                found.insert(k.clone());
                queue.push_back((k, joined));
            }
        }
    }
    let mut out: Vec<Subgroup> = found.into_iter().collect();
    out.sort_by(|a, b| (a.order(), &a.elements).cmp(&(b.order(), &b.elements)));
    Some(out)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn s3() -> FiniteGroup {
        FiniteGroup::from_permutations(3, &[vec![1, 0, 2], vec![1, 2, 0]], 100).unwrap()
    }

    #[test]
    fn cycle_notation_round_trip() {
        let p = parse_cycles("(0 1 2)(3 4)", 6).unwrap();
        assert_eq!(p, vec![1, 2, 0, 4, 3, 5]);
        assert_eq!(format_cycles(&p), "(0 1 2)(3 4)");
        assert_eq!(parse_cycles("()", 3).unwrap(), vec![0, 1, 2]);
        assert!(parse_cycles("(0 0)", 3).is_err());
        assert!(parse_cycles("(0 5)", 3).is_err());
        assert!(parse_cycles("0 1", 3).is_err());
    }

    #[test]
    fn symmetric_group_laws() {
        let g = s3();
        assert_eq!(g.order(), 6);
        for a in g.elements() {
            assert_eq!(g.mul(a, g.inv(a)), 0);
            assert_eq!(g.mul(0, a), a);
            for b in g.elements() {
                for c in g.elements() {
                    assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
                }
            }
        }
        // Permutation composition convention: (gh)(i) = g(h(i)).
        for a in g.elements() {
            for b in g.elements() {
                let pa = g.permutation(a).unwrap();
                let pb = g.permutation(b).unwrap();
                let pab = g.permutation(g.mul(a, b)).unwrap();
                for i in 0..3 {
                    assert_eq!(pab[i], pa[pb[i] as usize]);
                }
            }
        }
    }

    #[test]
    fn table_round_trip_and_validation() {
        let g = s3();
        let h = FiniteGroup::from_table(&g.table_rows()).unwrap();
        assert_eq!(h.order(), 6);
        assert_eq!(Subgroup::generated_by(&h, h.generators()).order(), 6);
        let bad = vec![vec![0, 1], vec![1, 1]];
        assert!(FiniteGroup::from_table(&bad).is_err());
    }

    #[test]
    fn order_cap() {
        let gens = vec![vec![1, 0, 2, 3, 4, 5, 6], vec![1, 2, 3, 4, 5, 6, 0]];
        assert!(
            matches!(FiniteGroup::from_permutations(7, &gens, 5000), Ok(g) if g.order() == 5040)
                || FiniteGroup::from_permutations(7, &gens, 5000).is_err()
        );
        assert!(matches!(
            FiniteGroup::from_permutations(7, &gens, 1000),
            Err(Error::SizeLimit(_))
        ));
    }

    #[test]
    fn subgroups_of_s3() {
        let g = s3();
        let subs = all_subgroups(&g, 100).unwrap();
        // trivial, three of order 2, A3, S3
        let orders: Vec<usize> = subs.iter().map(Subgroup::order).collect();
        assert_eq!(orders, vec![1, 2, 2, 2, 3, 6]);
        let a3 = &subs[4];
        assert!(a3.is_normal_in(&g, &subs[5]));
        assert!(!subs[1].is_normal_in(&g, &subs[5]));
        assert_eq!(a3.left_coset_representatives(&g, &subs[5]).len(), 2);
        assert!(
            Subgroup::from_elements(&g, [0, subs[1].elements()[1], subs[2].elements()[1]]).is_err()
        );
    }
}
