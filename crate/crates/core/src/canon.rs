//! Canonical forms for small graphs, unsigned and signed-up-to-switching.
//!
//! Vertices are first split into cells by colour refinement (an
//! isomorphism-invariant ordered partition). The canonical labelling is the
//! cell-respecting ordering whose upper-triangle adjacency code is largest,
//! found by branch and bound on code prefixes. For signed graphs the key adds
//! the non-tree signs after switching a fixed BFS forest of the canonical
//! graph to `+`, minimized over every ordering that attains the code.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Sign, SignedGraph, VertexId};

/// Largest vertex count a canonical code can hold (upper triangle in `u128`).
pub const MAX_CANON_VERTICES: usize = 16;

/// Default bound for [`canonical_key`].
pub const DEFAULT_KEY_BOUND: usize = 10;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("graph has {order} vertices; canonical forms are limited to {bound}")]
pub struct SizeBoundExceeded {
    pub order: usize,
    pub bound: usize,
}

/// Bitset adjacency on vertices `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Adjacency {
    rows: Vec<u32>,
}

impl Adjacency {
    pub fn empty(n: usize) -> Self {
        assert!(n <= 32);
        Adjacency { rows: vec![0; n] }
    }

    pub fn from_signed(g: &SignedGraph) -> Self {
        let mut a = Adjacency::empty(g.order());
        for (u, v, _) in g.edges() {
            let (i, j) = (g.index_of(u).unwrap(), g.index_of(v).unwrap());
            a.add_edge(i, j);
        }
        a
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    pub fn add_vertex(&mut self, neighbours: u32) {
        let n = self.rows.len();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if neighbours >> i & 1 == 1 {
                *row |= 1 << n;
            }
        }
        self.rows.push(neighbours);
    }

    pub fn add_edge(&mut self, i: usize, j: usize) {
        self.rows[i] |= 1 << j;
        self.rows[j] |= 1 << i;
    }

    #[inline]
    pub fn has(&self, i: usize, j: usize) -> bool {
        self.rows[i] >> j & 1 == 1
    }

    pub fn degree(&self, i: usize) -> u32 {
        self.rows[i].count_ones()
    }

    pub fn edge_count(&self) -> usize {
        self.rows.iter().map(|r| r.count_ones() as usize).sum::<usize>() / 2
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let n = self.n();
        (0..n)
            .flat_map(|i| (i + 1..n).filter(move |&j| self.has(i, j)).map(move |j| (i, j)))
            .collect()
    }

    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
        let mut seen = 1u32;
        let mut frontier = 1u32;
        while frontier != 0 {
            let mut next = 0;
            let mut f = frontier;
            while f != 0 {
                let v = f.trailing_zeros() as usize;
                f &= f - 1;
                next |= self.rows[v];
            }
            frontier = next & !seen;
            seen |= next;
        }
        seen == full
    }

    /// Graph with vertex `perm[p]` of `self` placed at position `p`.
    pub fn permuted(&self, perm: &[u8]) -> Adjacency {
        let n = self.n();
        let mut out = Adjacency::empty(n);
        for a in 0..n {
            for b in a + 1..n {
                if self.has(perm[a] as usize, perm[b] as usize) {
                    out.add_edge(a, b);
                }
            }
        }
        out
    }

    /// Removes vertex `v`, shifting later indices down.
    pub fn without(&self, v: usize) -> Adjacency {
        let keep: Vec<usize> = (0..self.n()).filter(|&i| i != v).collect();
        let mut out = Adjacency::empty(keep.len());
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate().skip(a + 1) {
                if self.has(i, j) {
                    out.add_edge(a, b);
                }
            }
        }
        out
    }

    /// Upper-triangle code, column by column.
    pub fn code(&self) -> u128 {
        let mut c = 0u128;
        for j in 1..self.n() {
            for i in 0..j {
                c = c << 1 | self.has(i, j) as u128;
            }
        }
        c
    }

    pub fn from_code(n: usize, code: u128) -> Adjacency {
        let mut out = Adjacency::empty(n);
        let total = n * n.saturating_sub(1) / 2;
        let mut bit = total;
        for j in 1..n {
            for i in 0..j {
                bit -= 1;
                if code >> bit & 1 == 1 {
                    out.add_edge(i, j);
                }
            }
        }
        out
    }

    pub fn to_signed(&self) -> SignedGraph {
        let edges = self
            .edges()
            .into_iter()
            .map(|(i, j)| (i as VertexId, j as VertexId, Sign::Pos));
        SignedGraph::on_range(self.n(), edges).expect("adjacency is simple")
    }
}

/// Isomorphism-invariant colour per vertex; colours are ranks `0..k`.
pub fn refine_colors(adj: &Adjacency) -> Vec<u32> {
    let n = adj.n();
    let mut colors: Vec<u32> = vec![0; n];
    let mut classes = 1;
    loop {
        let sigs: Vec<(u32, Vec<u32>)> = (0..n)
            .map(|v| {
                let mut nb: Vec<u32> = (0..n).filter(|&w| adj.has(v, w)).map(|w| colors[w]).collect();
                nb.sort_unstable();
                (colors[v], nb)
            })
            .collect();
        let mut distinct: Vec<&(u32, Vec<u32>)> = sigs.iter().collect();
        distinct.sort();
        distinct.dedup();
        let rank: BTreeMap<&(u32, Vec<u32>), u32> = distinct.iter().enumerate().map(|(i, s)| (*s, i as u32)).collect();
        let next: Vec<u32> = sigs.iter().map(|s| rank[s]).collect();
        let count = distinct.len();
        colors = next;
        if count == classes {
            return colors;
        }
        classes = count;
    }
}

struct Search<'a, F: FnMut(&[u8], bool)> {
    adj: &'a Adjacency,
    colors: Vec<u32>,
    slot_color: Vec<u32>,
    best: Option<u128>,
    total_bits: usize,
    perm: Vec<u8>,
    used: u32,
    on_best: F,
}

impl<F: FnMut(&[u8], bool)> Search<'_, F> {
    fn run(&mut self, pos: usize, code: u128) {
        let n = self.adj.n();
        if pos == n {
            if self.best.is_some_and(|b| code < b) {
                return;
            }
            let improved = self.best.is_none_or(|b| code > b);
            if improved {
                self.best = Some(code);
            }
            (self.on_best)(&self.perm, improved);
            return;
        }
        for v in 0..n {
            if self.used >> v & 1 == 1 || self.colors[v] != self.slot_color[pos] {
                continue;
            }
            let mut c = code;
            for i in 0..pos {
                c = c << 1 | self.adj.has(self.perm[i] as usize, v) as u128;
            }
            if let Some(best) = self.best {
                let len = (pos + 1) * pos / 2;
                let shift = self.total_bits - len;
                let best_prefix = if shift >= 128 { 0 } else { best >> shift };
                if c < best_prefix {
                    continue;
                }
            }
            self.perm.push(v as u8);
            self.used |= 1 << v;
            self.run(pos + 1, c);
            self.used &= !(1 << v);
            self.perm.pop();
        }
    }
}

/// Runs the canonical search; `on_leaf(perm, improved)` is called for every
/// ordering that ties or beats the best code so far (`improved` marks a new
/// maximum, invalidating earlier ties). Returns the maximal code.
fn search(adj: &Adjacency, on_leaf: impl FnMut(&[u8], bool)) -> u128 {
    let n = adj.n();
    assert!(n <= MAX_CANON_VERTICES);
    let colors = refine_colors(adj);
    let mut slot_color = colors.clone();
    slot_color.sort_unstable();
    let mut s = Search {
        adj,
        colors,
        slot_color,
        best: None,
        total_bits: n * n.saturating_sub(1) / 2,
        perm: Vec::with_capacity(n),
        used: 0,
        on_best: on_leaf,
    };
    s.run(0, 0);
    s.best.unwrap_or(0)
}

/// Canonical code and one canonical ordering (`perm[p]` = original index at position `p`).
pub fn canonical_form(adj: &Adjacency) -> (u128, Vec<u8>) {
    let mut best_perm = Vec::new();
    let code = search(adj, |perm, improved| {
        if improved {
            best_perm = perm.to_vec();
        }
    });
    (code, best_perm)
}

/// All orderings attaining the canonical code. For a graph already in
/// canonical labelling these are exactly its automorphisms.
pub fn canonical_orderings(adj: &Adjacency) -> (u128, Vec<Vec<u8>>) {
    let mut all: Vec<Vec<u8>> = Vec::new();
    let code = search(adj, |perm, improved| {
        if improved {
            all.clear();
        }
        all.push(perm.to_vec());
    });
    (code, all)
}

pub fn automorphisms(adj: &Adjacency) -> Vec<Vec<u8>> {
    let (_, perms) = canonical_orderings(adj);
    let Some(first) = perms.first() else {
        return vec![Vec::new()];
    };
    let mut inv = vec![0u8; first.len()];
    for (pos, &v) in first.iter().enumerate() {
        inv[v as usize] = pos as u8;
    }
    // p and p0 both map adj to the canonical graph, so p . p0^-1 fixes adj.
    perms
        .iter()
        .map(|p| (0..p.len()).map(|a| p[inv[a] as usize]).collect())
        .collect()
}

/// Signs of non-tree edges after switching a fixed BFS forest to `+`.
///
/// `signs[i][j]` is the edge sign in positional labelling; the forest and
/// edge order are those of `adj`. Bit set = negative.
pub(crate) struct SwitchNormalizer {
    forest: Vec<(usize, usize)>,
    non_tree: Vec<(usize, usize)>,
    roots: Vec<usize>,
}

impl SwitchNormalizer {
    pub(crate) fn new(adj: &Adjacency) -> Self {
        let n = adj.n();
        let mut seen = 0u32;
        let mut forest = Vec::new();
        let mut roots = Vec::new();
        for r in 0..n {
            if seen >> r & 1 == 1 {
                continue;
            }
            roots.push(r);
            seen |= 1 << r;
            let mut queue = std::collections::VecDeque::from([r]);
            while let Some(v) = queue.pop_front() {
                for w in 0..n {
                    if adj.has(v, w) && seen >> w & 1 == 0 {
                        seen |= 1 << w;
                        forest.push((v, w));
                        queue.push_back(w);
                    }
                }
            }
        }
        let tree: std::collections::BTreeSet<(usize, usize)> =
            forest.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        let non_tree = adj.edges().into_iter().filter(|e| !tree.contains(e)).collect();
        SwitchNormalizer {
            forest,
            non_tree,
            roots,
        }
    }

    pub(crate) fn non_tree_edges(&self) -> &[(usize, usize)] {
        &self.non_tree
    }

    /// `neg(i, j)` reports whether edge `{i, j}` is negative.
    pub(crate) fn mask(&self, n: usize, neg: impl Fn(usize, usize) -> bool) -> u128 {
        let mut flip = vec![false; n];
        for &r in &self.roots {
            flip[r] = false;
        }
        for &(p, c) in &self.forest {
            flip[c] = flip[p] ^ neg(p, c);
        }
        let mut m = 0u128;
        for (k, &(a, b)) in self.non_tree.iter().enumerate() {
            if neg(a, b) ^ flip[a] ^ flip[b] {
                m |= 1 << k;
            }
        }
        m
    }
}

/// Isomorphism-and-switching invariant of a signed graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CanonicalKey {
    pub order: u8,
    pub code: u128,
    pub signs: u128,
}

pub fn canonical_key(g: &SignedGraph) -> Result<CanonicalKey, SizeBoundExceeded> {
    canonical_key_bounded(g, DEFAULT_KEY_BOUND)
}

pub fn canonical_key_bounded(g: &SignedGraph, bound: usize) -> Result<CanonicalKey, SizeBoundExceeded> {
    let bound = bound.min(MAX_CANON_VERTICES);
    let n = g.order();
    if n > bound {
        return Err(SizeBoundExceeded { order: n, bound });
    }
    let adj = Adjacency::from_signed(&g.underlying());
    let mut neg = vec![0u32; n];
    for (u, v, s) in g.edges() {
        if s == Sign::Neg {
            let (i, j) = (g.index_of(u).unwrap(), g.index_of(v).unwrap());
            neg[i] |= 1 << j;
            neg[j] |= 1 << i;
        }
    }
    let (code, perms) = canonical_orderings(&adj);
    let normalizer = SwitchNormalizer::new(&Adjacency::from_code(n, code));
    let signs = perms
        .iter()
        .map(|p| normalizer.mask(n, |a, b| neg[p[a] as usize] >> p[b] & 1 == 1))
        .min()
        .unwrap_or(0);
    Ok(CanonicalKey {
        order: n as u8,
        code,
        signs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Sign::*;

    fn tri(signs: [Sign; 3], labels: [u32; 3]) -> SignedGraph {
        let [a, b, c] = labels;
        SignedGraph::with_edges(labels, [(a, b, signs[0]), (b, c, signs[1]), (a, c, signs[2])]).unwrap()
    }

    #[test]
    fn relabelled_triangles_agree() {
        let k1 = canonical_key(&tri([Pos, Pos, Neg], [0, 1, 2])).unwrap();
        let k2 = canonical_key(&tri([Neg, Pos, Pos], [7, 3, 5])).unwrap();
        assert_eq!(k1, k2);
    }

    #[test]
    fn cycle_parity_separates() {
        let k1 = canonical_key(&tri([Pos, Pos, Pos], [0, 1, 2])).unwrap();
        let k2 = canonical_key(&tri([Pos, Pos, Neg], [0, 1, 2])).unwrap();
        assert_ne!(k1, k2);
    }

    #[test]
    fn trees_collapse() {
        let a = SignedGraph::on_range(3, [(0, 1, Pos), (1, 2, Neg)]).unwrap();
        let b = SignedGraph::path(3);
        assert_eq!(canonical_key(&a).unwrap(), canonical_key(&b).unwrap());
    }

    #[test]
    fn bound_is_enforced() {
        let g = SignedGraph::path(11);
        assert_eq!(canonical_key(&g), Err(SizeBoundExceeded { order: 11, bound: 10 }));
    }

    #[test]
    fn code_round_trip_and_automorphisms() {
        let c5 = Adjacency::from_signed(&SignedGraph::cycle(5, 0));
        let (code, perm) = canonical_form(&c5);
        let canon = c5.permuted(&perm);
        assert_eq!(canon.code(), code);
        assert_eq!(Adjacency::from_code(5, code), canon);
        assert_eq!(automorphisms(&canon).len(), 10);
        let star = Adjacency::from_signed(&SignedGraph::star(3));
        let (_, p) = canonical_form(&star);
        assert_eq!(automorphisms(&star.permuted(&p)).len(), 6);
    }

    #[test]
    fn non_isomorphic_same_degrees_differ() {
        // Two triangles vs a hexagon: both 2-regular on six vertices.
        let two = SignedGraph::on_range(
            6,
            [
                (0, 1, Pos),
                (1, 2, Pos),
                (0, 2, Pos),
                (3, 4, Pos),
                (4, 5, Pos),
                (3, 5, Pos),
            ],
        )
        .unwrap();
        let hex = SignedGraph::cycle(6, 0);
        assert_ne!(canonical_key(&two).unwrap(), canonical_key(&hex).unwrap());
    }
}
