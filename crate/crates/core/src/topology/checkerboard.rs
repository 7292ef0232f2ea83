//! t'-moves on checkerboard plane graphs, with local embedding repair.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::plane::{trace_faces, two_colour, validate_checkerboard, Dart, Face, PlaneError, PlaneGraph, Violation};
use crate::graph::{SignedGraph, VertexId};
use crate::moves::{t_prime_move, MoveError, MoveRecord, ReductionTranscript};
use crate::reducer::{finish, gate, ReduceError, ReductionResult};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CheckerboardError {
    #[error(transparent)]
    Move(#[from] MoveError),
    #[error("move output is not a checkerboard graph: {0}")]
    ChecksFailed(String),
}

/// Parity union-find: `value(a) xor value(b) = parity`.
struct Parity {
    parent: Vec<usize>,
    rel: Vec<u8>,
}

impl Parity {
    fn new(n: usize) -> Self {
        Parity {
            parent: (0..n).collect(),
            rel: vec![0; n],
        }
    }

    fn find(&mut self, a: usize) -> (usize, u8) {
        if self.parent[a] == a {
            return (a, 0);
        }
        let (root, r) = self.find(self.parent[a]);
        self.parent[a] = root;
        self.rel[a] ^= r;
        (root, self.rel[a])
    }

    fn union(&mut self, a: usize, b: usize, parity: u8) -> bool {
        let (ra, pa) = self.find(a);
        let (rb, pb) = self.find(b);
        if ra == rb {
            return pa ^ pb == parity;
        }
        self.parent[ra] = rb;
        self.rel[ra] = pa ^ pb ^ parity;
        true
    }
}

fn key(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    (u.min(v), u.max(v))
}

fn insert_after(r: &mut Vec<VertexId>, after: VertexId, new: VertexId) {
    let i = r.iter().position(|&w| w == after).unwrap();
    r.insert(i + 1, new);
}

/// Corner choices for a new edge `x - w`: `(a, b)` inserts `w` after `a` in
/// the rotation at `x` and `x` after `b` at `w`. Only the two corners of `x`
/// beside `y` are offered.
fn corner_options(
    rot: &BTreeMap<VertexId, Vec<VertexId>>,
    x: VertexId,
    y: VertexId,
    w: VertexId,
) -> Vec<(VertexId, VertexId)> {
    let rx = &rot[&x];
    let iy = rx.iter().position(|&v| v == y).unwrap();
    let before = rx[(iy + rx.len() - 1) % rx.len()];
    let faces = trace_faces(rot);
    let mut out = Vec::new();
    for a in [y, before] {
        // The corner after `a` at `x` belongs to the face through `a -> x`.
        let face = faces.iter().find(|f| f.contains_dart((a, x))).unwrap();
        for &(b, head) in &face.darts {
            if head == w && !out.contains(&(a, b)) {
                out.push((a, b));
            }
        }
    }
    out
}

/// Applies a t'-move to the payload and repairs the embedding locally:
/// new edges at `x` go into a corner beside `y`, removed edges are dropped
/// from both rotations and arc directions of new edges follow the face
/// colouring. Rejects the move when no such repair is a checkerboard graph.
pub fn checkerboard_move(
    p: &PlaneGraph,
    x: VertexId,
    y: VertexId,
) -> Result<(PlaneGraph, MoveRecord), CheckerboardError> {
    let g = p.graph();
    let (g2, rec) = t_prime_move(g, x, y)?;
    let added: Vec<VertexId> = g2.neighbors(x).into_iter().filter(|&w| !g.has_edge(x, w)).collect();
    let removed: Vec<VertexId> = g.neighbors(x).into_iter().filter(|&w| !g2.has_edge(x, w)).collect();

    // Every combination of corner choices for the added edges.
    let mut partial = vec![p.rotations().clone()];
    for &w in &added {
        let mut next = Vec::new();
        for rot in partial {
            for (a, b) in corner_options(&rot, x, y, w) {
                let mut r = rot.clone();
                insert_after(r.get_mut(&x).unwrap(), a, w);
                insert_after(r.get_mut(&w).unwrap(), b, x);
                next.push(r);
            }
        }
        partial = next;
    }
    if partial.is_empty() {
        return Err(CheckerboardError::ChecksFailed(format!(
            "no face beside {x}-{y} reaches the new neighbours of {x}"
        )));
    }
    let mut last = String::new();
    for rot in partial {
        match finish_repair(p, &g2, rot, x, &added, &removed) {
            Ok(q) => return Ok((q, rec)),
            Err(msg) => last = msg,
        }
    }
    Err(CheckerboardError::ChecksFailed(last))
}

/// Removes the deleted edges, then tries each face that inherits a dart of
/// the old unbounded face (a chord through that face may be drawn around
/// either side) and directs the new edges by the face colouring.
fn finish_repair(
    p: &PlaneGraph,
    g2: &SignedGraph,
    mut rot: BTreeMap<VertexId, Vec<VertexId>>,
    x: VertexId,
    added: &[VertexId],
    removed: &[VertexId],
) -> Result<PlaneGraph, String> {
    for &w in removed {
        rot.get_mut(&x).unwrap().retain(|&v| v != w);
        rot.get_mut(&w).unwrap().retain(|&v| v != x);
    }
    let old_faces = p.faces();
    let faces = trace_faces(&rot);
    let comp_x = g2.components().into_iter().find(|c| c.contains(&x)).unwrap();
    let mut outer: Vec<Dart> = p
        .outer_darts()
        .iter()
        .copied()
        .filter(|d| !comp_x.contains(&d.0))
        .collect();
    let inherited: Vec<Dart> = p
        .outer_darts()
        .iter()
        .filter(|d| comp_x.contains(&d.0))
        .flat_map(|&d| old_faces.iter().find(|f| f.contains_dart(d)).unwrap().darts.clone())
        .collect();
    let mut candidates: Vec<usize> = Vec::new();
    for d in inherited {
        if let Some(i) = faces.iter().position(|f| f.contains_dart(d)) {
            if !candidates.contains(&i) {
                candidates.push(i);
            }
        }
    }
    if candidates.is_empty() && comp_x.len() > 1 {
        return Err("unbounded face vanishes".into());
    }
    let fixed = outer.len();
    let mut last = String::from("no candidate unbounded face");
    for &c in &candidates {
        outer.truncate(fixed);
        outer.push(faces[c].darts[0]);
        match direct_and_validate(p, g2, &rot, &faces, &outer, x, added, removed) {
            Ok(q) => return Ok(q),
            Err(msg) => last = msg,
        }
    }
    Err(last)
}

#[allow(clippy::too_many_arguments)]
fn direct_and_validate(
    p: &PlaneGraph,
    g2: &SignedGraph,
    rot: &BTreeMap<VertexId, Vec<VertexId>>,
    faces: &[Face],
    outer: &[Dart],
    x: VertexId,
    added: &[VertexId],
    removed: &[VertexId],
) -> Result<PlaneGraph, String> {
    // Colour variables: 0 is the constant, then faces, then new edges.
    let outer_faces: Vec<usize> = outer
        .iter()
        .filter_map(|d| faces.iter().position(|f| f.contains_dart(*d)))
        .collect();
    let bounded: Vec<(usize, Face)> = faces
        .iter()
        .enumerate()
        .filter(|(i, _)| !outer_faces.contains(i))
        .map(|(i, f)| (i, f.clone()))
        .collect();
    if let Err(cycle) = two_colour(&bounded) {
        return Err(format!("bounded faces {cycle:?} form an odd dual cycle"));
    }
    let edge_var = |w: VertexId| 1 + faces.len() + added.iter().position(|&a| a == w).unwrap();
    let mut uf = Parity::new(1 + faces.len() + added.len());
    for (i, f) in faces.iter().enumerate() {
        if outer_faces.contains(&i) {
            continue;
        }
        for &(a, b) in &f.darts {
            let new_edge = (a == x && added.contains(&b)) || (b == x && added.contains(&a));
            let ok = if new_edge {
                let w = if a == x { b } else { a };
                uf.union(edge_var(w), 1 + i, u8::from(a > b))
            } else {
                let arc = p.arc(a, b).expect("old edge has an arc");
                uf.union(1 + i, 0, u8::from(arc != (a, b)))
            };
            if !ok {
                return Err(format!("face through {a}->{b} cannot be coherently directed"));
            }
        }
    }
    let mut arcs: Vec<Dart> = p
        .arcs()
        .filter(|&(t, h)| !(removed.contains(&t) && h == x || removed.contains(&h) && t == x))
        .collect();
    let (zero_root, zero_parity) = uf.find(0);
    for &w in added {
        let (root, parity) = uf.find(edge_var(w));
        let value = if root == zero_root {
            parity ^ zero_parity
        } else {
            parity
        };
        let (lo, hi) = key(x, w);
        arcs.push(if value == 0 { (lo, hi) } else { (hi, lo) });
    }
    let q = PlaneGraph::new(g2.clone(), arcs, rot.clone(), outer.to_vec()).map_err(|e: PlaneError| e.to_string())?;
    let report = validate_checkerboard(&q);
    match report.violation {
        None => Ok(q),
        Some(Violation::NotDirected { walk, .. }) => Err(format!("bounded face {walk:?} is not a directed cycle")),
        Some(Violation::OddDualCycle { faces }) => Err(format!("bounded faces {faces:?} form an odd dual cycle")),
    }
}

/// Every accepted checkerboard move from `p`, in `(x, y)` order.
pub fn checkerboard_moves(p: &PlaneGraph) -> Vec<(VertexId, VertexId, PlaneGraph)> {
    let g = p.graph();
    let mut out = Vec::new();
    for &x in g.vertices() {
        for y in g.neighbors(x) {
            if g.degree(y) > 3 {
                continue;
            }
            if let Ok((q, _)) = checkerboard_move(p, x, y) {
                out.push((x, y, q));
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckerboardReduction {
    pub result: ReductionResult,
    /// The plane tree reached before the final switching and relabelling.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<PlaneGraph>,
}

/// Reduces a connected checkerboard graph to an ADE diagram using only
/// moves whose outputs stay checkerboard graphs. Best-first search on
/// (edges beyond a spanning tree, maximum degree).
pub fn reduce_checkerboard(p: &PlaneGraph, node_limit: usize) -> Result<CheckerboardReduction, ReduceError> {
    let report = validate_checkerboard(p);
    if !report.valid {
        return Err(ReduceError::InvalidInput(format!(
            "not a checkerboard graph: {:?}",
            report.violation
        )));
    }
    let g = p.graph();
    match gate(g) {
        Err(ReduceError::NotPositive(np)) => {
            return Ok(CheckerboardReduction {
                result: ReductionResult::NonPositive(np),
                tree: None,
            })
        }
        other => other?,
    }
    let score = |q: &PlaneGraph| (q.graph().size() + 1 - q.graph().order(), q.graph().max_degree());
    let mut states: Vec<(PlaneGraph, Option<(usize, MoveRecord)>)> = vec![(p.clone(), None)];
    let mut heap = BinaryHeap::from([Reverse((score(p), 0usize))]);
    // Signs never block a move on a positive graph, so states are keyed by
    // the unsigned plane structure.
    let plane_key = |q: &PlaneGraph| {
        let outer = q.outer_faces();
        (q.rotations().clone(), q.arcs().collect::<Vec<_>>(), outer)
    };
    let mut seen = HashSet::from([plane_key(p)]);
    let mut found = None;
    while let Some(Reverse((_, id))) = heap.pop() {
        let q = states[id].0.clone();
        if q.graph().is_tree() {
            found = Some(id);
            break;
        }
        let g = q.graph();
        for &x in g.vertices() {
            for y in g.neighbors(x) {
                if g.degree(y) > 3 {
                    continue;
                }
                let Ok((next, rec)) = checkerboard_move(&q, x, y) else {
                    continue;
                };
                if !seen.insert(plane_key(&next)) {
                    continue;
                }
                if states.len() >= node_limit {
                    return Err(ReduceError::SearchExhausted {
                        stage: "reducing a checkerboard graph".into(),
                        explored: states.len(),
                    });
                }
                heap.push(Reverse((score(&next), states.len())));
                states.push((next, Some((id, rec))));
            }
        }
    }
    let Some(mut id) = found else {
        return Err(ReduceError::Unreachable {
            stage: "reducing a checkerboard graph".into(),
            explored: states.len(),
        });
    };
    let tree = states[id].0.clone();
    let mut records = Vec::new();
    while let Some((parent, rec)) = &states[id].1 {
        records.push(rec.clone());
        id = *parent;
    }
    records.reverse();
    let mut t = ReductionTranscript::empty(g.clone());
    for r in records {
        t.push(r)?;
    }
    Ok(CheckerboardReduction {
        result: finish(t)?,
        tree: Some(tree),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Sign::*;
    use crate::linalg::{definiteness, gram_matrix};
    use crate::topology::plane::checkerboard_embedding;

    #[test]
    fn single_edge_flips_sign() {
        let p = PlaneGraph::parse("graph signed\nv 0\nv 1\ne 0 1 +\ndir 0 1\nrot 0: 1\nrot 1: 0\n").unwrap();
        let (q, _) = checkerboard_move(&p, 0, 1).unwrap();
        assert_eq!(q.graph().sign(0, 1), Some(Neg));
        assert_eq!(q.rotations(), p.rotations());
        assert_eq!(q.arc(0, 1), Some((0, 1)));
    }

    #[test]
    fn triangle_collapses_to_path() {
        let p = PlaneGraph::parse(
            "graph signed\nv 0\nv 1\nv 2\ne 0 1 +\ne 1 2 +\ne 0 2 +\n\
             dir 0 1\ndir 1 2\ndir 2 0\nrot 0: 1 2\nrot 1: 2 0\nrot 2: 0 1\nouter 1\n",
        )
        .unwrap();
        let (q, _) = checkerboard_move(&p, 0, 1).unwrap();
        assert!(q.graph().is_tree());
        assert!(!q.graph().has_edge(0, 2));
        assert!(validate_checkerboard(&q).valid);
    }

    #[test]
    fn moves_preserve_invariants() {
        let g = SignedGraph::on_range(4, [(0, 1, Pos), (1, 2, Pos), (2, 3, Pos), (3, 0, Neg)]).unwrap();
        let p = checkerboard_embedding(&g).unwrap();
        let det = gram_matrix(&g).det();
        let verdict = definiteness(&gram_matrix(&g)).verdict;
        let moves = checkerboard_moves(&p);
        assert!(!moves.is_empty());
        for (_, _, q) in moves {
            assert_eq!(gram_matrix(q.graph()).det(), det);
            assert_eq!(definiteness(&gram_matrix(q.graph())).verdict, verdict);
            assert!(validate_checkerboard(&q).valid);
        }
    }

    #[test]
    fn reduces_small_checkerboard_graphs() {
        let g = SignedGraph::on_range(3, [(0, 1, Pos), (1, 2, Pos), (0, 2, Pos)]).unwrap();
        let p = checkerboard_embedding(&g).unwrap();
        let r = reduce_checkerboard(&p, 10_000).unwrap();
        let red = r.result.ade().unwrap();
        assert_eq!(red.ade.to_string(), "A_3");
        assert!(red.transcript.verify(&red.certificate).unwrap());
        let c4 = SignedGraph::cycle(4, 1);
        let r = reduce_checkerboard(&checkerboard_embedding(&c4).unwrap(), 10_000).unwrap();
        assert_eq!(r.result.ade().unwrap().ade.to_string(), "D_4");
    }

    #[test]
    fn some_move_is_rejected_for_an_odd_dual() {
        use crate::canon::Adjacency;
        use crate::enumerate::{connected_graphs, switching_classes};
        use crate::par::Exec;
        let mut found = false;
        'search: for adj in connected_graphs(4, Exec::Serial) {
            let Some(p0) = checkerboard_embedding(&Adjacency::to_signed(&adj)) else {
                continue;
            };
            for g in switching_classes(&adj) {
                let p = p0.with_graph(g.clone()).unwrap();
                for &x in g.vertices() {
                    for y in g.neighbors(x) {
                        if let Err(CheckerboardError::ChecksFailed(m)) = checkerboard_move(&p, x, y) {
                            assert!(t_prime_move(&g, x, y).is_ok());
                            if m.contains("odd dual cycle") {
                                found = true;
                                break 'search;
                            }
                        }
                    }
                }
            }
        }
        assert!(found);
    }
}
