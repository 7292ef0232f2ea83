use ade_core::certificates::all_cycles_positive;
use ade_core::enumerate::{connected_graphs, signings_up_to_isomorphism};
use ade_core::moves::{certificate, t_move, MoveRecord, ReductionTranscript};
use ade_core::switching::switch;
use ade_core::{definiteness, gram_matrix, Exec, Sign, SignedGraph, VertexId};
use num_bigint::BigInt;
use proptest::prelude::*;

/// Random signed graph on `2..=max_n` vertices.
fn signed_graph(max_n: usize) -> impl Strategy<Value = SignedGraph> {
    (2..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        prop::collection::vec(0u8..4, pairs).prop_map(move |cells| {
            let mut edges = Vec::new();
            let mut k = 0;
            for i in 0..n {
                for j in i + 1..n {
                    // 0 or 1: no edge, 2: positive, 3: negative
                    match cells[k] {
                        2 => edges.push((i as VertexId, j as VertexId, Sign::Pos)),
                        3 => edges.push((i as VertexId, j as VertexId, Sign::Neg)),
                        _ => {}
                    }
                    k += 1;
                }
            }
            SignedGraph::on_range(n, edges).unwrap()
        })
    })
}

/// Replays `picks` as moves: each pick selects an oriented edge for a
/// t-move, falling back to a switch when the move is not representable.
fn transcript(g: SignedGraph, picks: &[(usize, bool)]) -> ReductionTranscript {
    let mut t = ReductionTranscript::empty(g);
    for &(pick, flip) in picks {
        let cur = t.end.clone();
        let edges: Vec<_> = cur.edges().collect();
        let m = if edges.is_empty() {
            MoveRecord::Switch {
                vertex: cur.vertices()[pick % cur.order()],
            }
        } else {
            let (u, v, _) = edges[pick % edges.len()];
            let (x, y) = if flip { (v, u) } else { (u, v) };
            match t_move(&cur, x, y) {
                Ok((_, rec)) => rec,
                Err(_) => MoveRecord::Switch { vertex: x },
            }
        };
        t.push(m).unwrap();
    }
    t
}

proptest! {
    #[test]
    fn certificates_verify(g in signed_graph(8), picks in prop::collection::vec((0usize..64, any::<bool>()), 0..20)) {
        let t = transcript(g, &picks);
        let cert = certificate(&t).unwrap();
        let det = cert.u.det();
        prop_assert!(det == BigInt::from(1) || det == BigInt::from(-1));
        prop_assert!(t.verify(&cert).unwrap());
        prop_assert!(t.is_consistent());
    }

    #[test]
    fn t_moves_preserve_det_and_verdict(g in signed_graph(7), pick in 0usize..64, flip in any::<bool>()) {
        let edges: Vec<_> = g.edges().collect();
        prop_assume!(!edges.is_empty());
        let (u, v, _) = edges[pick % edges.len()];
        let (x, y) = if flip { (v, u) } else { (u, v) };
        if let Ok((h, _)) = t_move(&g, x, y) {
            let (m0, m1) = (gram_matrix(&g), gram_matrix(&h));
            prop_assert_eq!(m0.det(), m1.det());
            prop_assert_eq!(definiteness(&m0).verdict, definiteness(&m1).verdict);
            prop_assert_eq!(h.order(), g.order());
        }
    }

    #[test]
    fn switching_twice_is_identity(g in signed_graph(7), pick in 0usize..8) {
        let v = g.vertices()[pick % g.order()];
        prop_assert_eq!(switch(&switch(&g, v).unwrap(), v).unwrap(), g);
    }
}

#[test]
fn t_move_is_an_involution_on_graphs_with_positive_cycles() {
    let mut checked = 0;
    for n in 2..=6 {
        for adj in connected_graphs(n, Exec::default()) {
            for g in signings_up_to_isomorphism(&adj) {
                if !all_cycles_positive(&g).unwrap().is_positive() {
                    continue;
                }
                for (u, v, _) in g.edges() {
                    for (x, y) in [(u, v), (v, u)] {
                        let (h, _) = t_move(&g, x, y).unwrap();
                        let (back, _) = t_move(&h, x, y).unwrap();
                        assert_eq!(back, g, "t-move at ({x},{y}) on {g:?}");
                        checked += 1;
                    }
                }
            }
        }
    }
    assert!(checked > 100);
}
