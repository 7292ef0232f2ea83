use std::collections::BTreeMap;

use ade_core::canon::{canonical_key, CanonicalKey};
use ade_core::certificates::{default_catalog, enumerate_cycles, find_forbidden_minor};
use ade_core::enumerate::{connected_graphs, switching_classes};
use ade_core::{definiteness, gram_matrix, Exec, SignedGraph, VertexId};

fn positive(g: &SignedGraph) -> bool {
    definiteness(&gram_matrix(g)).is_positive_definite()
}

/// Shrinks a non-positive connected graph to a connected induced subgraph
/// that is non-positive while every connected one-vertex deletion is positive.
fn minimal_obstruction(g: &SignedGraph) -> SignedGraph {
    let mut cur = g.clone();
    'shrink: loop {
        for &v in cur.vertices() {
            let keep: Vec<VertexId> = cur.vertices().iter().copied().filter(|&w| w != v).collect();
            let h = cur.induced(&keep);
            if h.is_connected() && !positive(&h) {
                cur = h;
                continue 'shrink;
            }
        }
        return cur;
    }
}

fn is_cycle(g: &SignedGraph) -> bool {
    g.is_connected() && g.size() == g.order() && g.vertices().iter().all(|&v| g.degree(v) == 2)
}

#[test]
fn certificates_embed_non_positive_patterns() {
    let catalog = default_catalog();
    for n in 4..=7 {
        for adj in connected_graphs(n, Exec::default()) {
            let g = adj.to_signed();
            if let Some(c) = find_forbidden_minor(&g, catalog) {
                assert!(c.holds(&g, catalog));
                let ids: Vec<VertexId> = c.embedding.iter().map(|&(_, host)| host).collect();
                let h = g.induced(&ids);
                assert!(h.is_tree() && !positive(&h));
            }
        }
    }
}

/// Mined trees and non-positive induced cycles account for every
/// non-positive graph on at most 7 vertices except those containing one of
/// a fixed set of minimal obstructions that are neither trees nor
/// cycles.
#[test]
fn mined_patterns_and_cycles_cover_non_positive_graphs() {
    let catalog = default_catalog();
    let mut other: BTreeMap<CanonicalKey, SignedGraph> = BTreeMap::new();
    let (mut non_positive, mut by_tree, mut by_cycle) = (0, 0, 0);
    for n in 1..=7 {
        for adj in connected_graphs(n, Exec::default()) {
            for g in switching_classes(&adj) {
                if positive(&g) {
                    continue;
                }
                non_positive += 1;
                if find_forbidden_minor(&g, catalog).is_some() {
                    by_tree += 1;
                    continue;
                }
                if enumerate_cycles(&g).unwrap().iter().any(|c| c.induced && !c.positive) {
                    by_cycle += 1;
                    continue;
                }
                let m = minimal_obstruction(&g);
                assert!(!m.is_tree() && !is_cycle(&m), "{g:?}");
                other.entry(canonical_key(&m).unwrap()).or_insert(m);
            }
        }
    }
    assert_eq!(non_positive, 1 + 6 + 62 + 1051 + 41739);
    assert!(by_tree > 0 && by_cycle > 0);
    // Every extra obstruction is itself non-positive and minimal.
    for m in other.values() {
        assert!(!positive(m) && minimal_obstruction(m) == *m);
    }
    assert_eq!(
        non_positive - by_tree - by_cycle,
        1 + 9 + 116,
        "uncovered graphs per size 5, 6, 7"
    );
    assert_eq!(other.len(), 25);
}
