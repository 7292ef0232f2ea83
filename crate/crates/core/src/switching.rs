//! Vertex switching: negating every edge at a vertex. This is congruence of
//! the Gram matrix by a diagonal `±1` matrix.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

use crate::graph::{Sign, SignedGraph, VertexId};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown vertex {0}")]
pub struct UnknownVertex(pub VertexId);

pub fn switch(g: &SignedGraph, v: VertexId) -> Result<SignedGraph, UnknownVertex> {
    if !g.contains(v) {
        return Err(UnknownVertex(v));
    }
    let mut out = g.clone();
    for w in g.neighbors(v) {
        let s = g.sign(v, w).expect("neighbour");
        out.set_edge(v, w, Some(s.flip()));
    }
    Ok(out)
}

/// BFS spanning forest: each component is rooted at its first vertex in the
/// graph's vertex order and children are visited in ascending id order.
/// Returns `(parent, child)` tree edges in discovery order.
pub fn bfs_forest(g: &SignedGraph) -> Vec<(VertexId, VertexId)> {
    let mut seen = BTreeSet::new();
    let mut tree = Vec::new();
    for &root in g.vertices() {
        if !seen.insert(root) {
            continue;
        }
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for w in g.neighbors(v) {
                if seen.insert(w) {
                    tree.push((v, w));
                    queue.push_back(w);
                }
            }
        }
    }
    tree
}

/// Switches so that every edge of the BFS spanning forest is positive.
///
/// Returns the normalized graph and the switch sequence producing it. The
/// remaining (non-tree) signs are then a complete switching invariant for
/// this labelled graph.
pub fn tree_normalize(g: &SignedGraph) -> (SignedGraph, Vec<VertexId>) {
    let mut cur = g.clone();
    let mut switches = Vec::new();
    for (parent, child) in bfs_forest(g) {
        if cur.sign(parent, child) == Some(Sign::Neg) {
            cur = switch(&cur, child).expect("tree vertex");
            switches.push(child);
        }
    }
    (cur, switches)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Sign::*;
    use crate::linalg::gram_matrix;

    #[test]
    fn switch_single_edge() {
        let g = SignedGraph::path(2);
        for v in [0, 1] {
            let s = switch(&g, v).unwrap();
            assert_eq!(s.sign(0, 1), Some(Neg));
            assert_eq!(switch(&s, v).unwrap(), g);
        }
        assert_eq!(switch(&g, 9), Err(UnknownVertex(9)));
    }

    #[test]
    fn switch_triangle_at_shared_vertex() {
        // ab:+, bc:+, ca:-; b is shared by the two positive edges.
        let g = SignedGraph::on_range(3, [(0, 1, Pos), (1, 2, Pos), (0, 2, Neg)]).unwrap();
        let s = switch(&g, 1).unwrap();
        assert_eq!(s.negative_edges(), 3);
        assert_eq!(gram_matrix(&s).det(), gram_matrix(&g).det());
    }

    #[test]
    fn tree_normalize_examples() {
        let p = SignedGraph::on_range(3, [(0, 1, Neg), (1, 2, Neg)]).unwrap();
        let (t, sw) = tree_normalize(&p);
        assert_eq!(t.negative_edges(), 0);
        let mut replay = p.clone();
        for v in &sw {
            replay = switch(&replay, *v).unwrap();
        }
        assert_eq!(replay, t);

        let (t, sw) = tree_normalize(&SignedGraph::path(5));
        assert_eq!(t, SignedGraph::path(5));
        assert!(sw.is_empty());

        let c = SignedGraph::cycle(4, 1);
        let (t, _) = tree_normalize(&c);
        assert_eq!(t.negative_edges(), 1);
    }
}
