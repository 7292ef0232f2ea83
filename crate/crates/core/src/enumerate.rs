//! Exhaustive generation of small graphs up to isomorphism, and of their
//! signings up to isomorphism and switching.

use std::collections::BTreeSet;

use crate::canon::{automorphisms, canonical_form, Adjacency, SwitchNormalizer};
use crate::graph::{Sign, SignedGraph, VertexId};
use crate::par::Exec;

fn canonical(adj: &Adjacency) -> Adjacency {
    let (code, _) = canonical_form(adj);
    Adjacency::from_code(adj.n(), code)
}

/// Connected graphs on exactly `n` vertices, one per isomorphism class, in
/// canonical labelling, sorted by canonical code.
///
/// Every connected graph has a vertex whose removal leaves it connected, so
/// extending each class on `n - 1` vertices by a vertex with a nonempty
/// neighbourhood reaches every class.
pub fn connected_graphs(n: usize, exec: Exec) -> Vec<Adjacency> {
    assert!(
        (1..=10).contains(&n),
        "connected graph enumeration is limited to 1..=10 vertices"
    );
    let mut level = vec![Adjacency::empty(1)];
    for k in 2..=n {
        let seeds = level;
        let found: Vec<Adjacency> = exec.flat_map(seeds, |g| {
            (1u32..1 << (k - 1))
                .map(|nb| {
                    let mut h = g.clone();
                    h.add_vertex(nb);
                    canonical(&h)
                })
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        });
        let set: BTreeSet<(u128, Adjacency)> = found.into_iter().map(|a| (a.code(), a)).collect();
        level = set.into_iter().map(|(_, a)| a).collect();
    }
    level
}

/// All graphs on exactly `n` vertices (connected or not), one per
/// isomorphism class, sorted by canonical code.
pub fn all_graphs(n: usize, exec: Exec) -> Vec<Adjacency> {
    assert!((1..=9).contains(&n), "graph enumeration is limited to 1..=9 vertices");
    let mut level = vec![Adjacency::empty(1)];
    for k in 2..=n {
        let seeds = level;
        let found: Vec<Adjacency> = exec.flat_map(seeds, |g| {
            (0u32..1 << (k - 1))
                .map(|nb| {
                    let mut h = g.clone();
                    h.add_vertex(nb);
                    canonical(&h)
                })
                .collect::<BTreeSet<_>>()
                .into_iter()
                .collect()
        });
        let set: BTreeSet<(u128, Adjacency)> = found.into_iter().map(|a| (a.code(), a)).collect();
        level = set.into_iter().map(|(_, a)| a).collect();
    }
    level
}

/// Unlabelled trees on exactly `n` vertices in canonical labelling.
pub fn trees(n: usize) -> Vec<Adjacency> {
    assert!((1..=16).contains(&n), "tree enumeration is limited to 1..=16 vertices");
    let mut level = vec![Adjacency::empty(1)];
    for k in 2..=n {
        let mut set = BTreeSet::new();
        for t in &level {
            for v in 0..k - 1 {
                let mut h = t.clone();
                h.add_vertex(1 << v);
                let c = canonical(&h);
                set.insert((c.code(), c));
            }
        }
        level = set.into_iter().map(|(_, a)| a).collect();
    }
    level
}

fn signed_from_masks(adj: &Adjacency, negative: impl Fn(usize, usize) -> bool) -> SignedGraph {
    let edges = adj.edges().into_iter().map(|(i, j)| {
        let s = if negative(i, j) { Sign::Neg } else { Sign::Pos };
        (i as VertexId, j as VertexId, s)
    });
    SignedGraph::on_range(adj.n(), edges).expect("adjacency is simple")
}

/// One signing per class of `adj` under automorphisms and switching.
///
/// Classes are indexed by the signs of the non-tree edges once the BFS
/// forest is switched positive; representatives are the smallest index in
/// each automorphism orbit, emitted in increasing order.
pub fn switching_classes(adj: &Adjacency) -> Vec<SignedGraph> {
    let n = adj.n();
    let norm = SwitchNormalizer::new(adj);
    let non_tree = norm.non_tree_edges().to_vec();
    let k = non_tree.len();
    assert!(k <= 24, "too many independent cycles to enumerate signings");
    let autos = automorphisms(adj);
    let neg_of = |mask: u64| {
        let mut neg = vec![0u32; n];
        for (b, &(i, j)) in non_tree.iter().enumerate() {
            if mask >> b & 1 == 1 {
                neg[i] |= 1 << j;
                neg[j] |= 1 << i;
            }
        }
        neg
    };
    let mut seen = vec![false; 1 << k];
    let mut out = Vec::new();
    for mask in 0..1u64 << k {
        if seen[mask as usize] {
            continue;
        }
        let neg = neg_of(mask);
        for p in &autos {
            let image = norm.mask(n, |a, b| neg[p[a] as usize] >> p[b] & 1 == 1);
            seen[image as usize] = true;
        }
        out.push(signed_from_masks(adj, |i, j| neg[i] >> j & 1 == 1));
    }
    out
}

/// One signing per class of `adj` under automorphisms only.
pub fn signings_up_to_isomorphism(adj: &Adjacency) -> Vec<SignedGraph> {
    let edges = adj.edges();
    let m = edges.len();
    assert!(m <= 24, "too many edges to enumerate signings");
    let index = |i: usize, j: usize| edges.iter().position(|&e| e == (i.min(j), i.max(j))).unwrap();
    let autos = automorphisms(adj);
    // perm_edges[p][e] = index of the image of edge e under p^-1 in positional terms.
    let perm_edges: Vec<Vec<usize>> = autos
        .iter()
        .map(|p| {
            edges
                .iter()
                .map(|&(a, b)| index(p[a] as usize, p[b] as usize))
                .collect()
        })
        .collect();
    let mut seen = vec![false; 1 << m];
    let mut out = Vec::new();
    for mask in 0..1u64 << m {
        if seen[mask as usize] {
            continue;
        }
        for pe in &perm_edges {
            let mut image = 0u64;
            for (e, &src) in pe.iter().enumerate() {
                image |= (mask >> src & 1) << e;
            }
            seen[image as usize] = true;
        }
        out.push(signed_from_masks(adj, |i, j| mask >> index(i, j) & 1 == 1));
    }
    out
}

/// Every labelled signed graph on `0..n` (all graphs, all signings).
pub fn labelled_signed_graphs(n: usize, connected: bool) -> Vec<SignedGraph> {
    assert!(n <= 5, "labelled enumeration is limited to 5 vertices");
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    let mut out = Vec::new();
    for present in 0..1u32 << pairs.len() {
        let mut adj = Adjacency::empty(n);
        for (b, &(i, j)) in pairs.iter().enumerate() {
            if present >> b & 1 == 1 {
                adj.add_edge(i, j);
            }
        }
        if connected && !adj.is_connected() {
            continue;
        }
        let edges = adj.edges();
        for signs in 0..1u32 << edges.len() {
            out.push(signed_from_masks(&adj, |i, j| {
                let e = edges.iter().position(|&e| e == (i, j)).unwrap();
                signs >> e & 1 == 1
            }));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connected_counts_match_known_sequence() {
        // OEIS A001349.
        let expected = [1, 1, 2, 6, 21, 112];
        for (n, &count) in (1..=6).zip(&expected) {
            assert_eq!(connected_graphs(n, Exec::default()).len(), count, "n={n}");
        }
    }

    #[test]
    fn all_graph_counts_match_known_sequence() {
        // OEIS A000088.
        let expected = [1, 2, 4, 11, 34, 156];
        for (n, &count) in (1..=6).zip(&expected) {
            assert_eq!(all_graphs(n, Exec::Serial).len(), count, "n={n}");
        }
    }

    #[test]
    fn tree_counts_match_known_sequence() {
        // OEIS A000055.
        let expected = [1, 1, 1, 2, 3, 6, 11, 23, 47, 106];
        for (n, &count) in (1..=10).zip(&expected) {
            assert_eq!(trees(n).len(), count, "n={n}");
        }
    }

    #[test]
    fn triangle_has_two_switching_classes() {
        let tri = canonical(&Adjacency::from_signed(&SignedGraph::cycle(3, 0)));
        let classes = switching_classes(&tri);
        assert_eq!(classes.len(), 2);
        let parities: BTreeSet<usize> = classes.iter().map(|g| g.negative_edges() % 2).collect();
        assert_eq!(parities, BTreeSet::from([0, 1]));
    }

    #[test]
    fn k4_switching_classes() {
        // Switching classes of signed K4 up to isomorphism = two-graphs on 4 points: 3.
        let k4 = canonical(&Adjacency::from_signed(
            &SignedGraph::on_range(4, (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j, Sign::Pos)))).unwrap(),
        ));
        assert_eq!(switching_classes(&k4).len(), 3);
    }

    #[test]
    fn triangle_signings_up_to_isomorphism() {
        let tri = canonical(&Adjacency::from_signed(&SignedGraph::cycle(3, 0)));
        assert_eq!(signings_up_to_isomorphism(&tri).len(), 4);
    }

    #[test]
    fn labelled_counts() {
        // Connected labelled graphs on 3 vertices: 3 paths (4 signings) + triangle (8).
        assert_eq!(labelled_signed_graphs(3, true).len(), 3 * 4 + 8);
    }
}
