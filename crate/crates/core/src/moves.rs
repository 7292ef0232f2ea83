//! The t-move rewriting calculus on signed graphs.
//!
//! A t-move on edge `(x, y)` with pivot `x` and edge sign `ε` toggles the
//! edges from `x` to every other neighbour `v` of `y` (a created edge gets
//! `sign(y, v)` when `ε = -1` and the opposite sign when `ε = +1`), then
//! negates `ε`. On Gram matrices it is the congruence `C_x += -ε C_y`,
//! `R_x += -ε R_y`; it stays inside signed simple graphs exactly when every
//! triangle through `(x, y)` is positive.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Sign, SignedGraph, VertexId};
use crate::linalg::{gram_matrix, GramMatrix, IntMatrix, MatrixError};
use crate::switching::switch;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum MoveError {
    #[error("no edge {0}-{1}")]
    NoSuchEdge(VertexId, VertexId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("move on {x}-{y} is not representable: triangle {x}-{y}-{via} is not positive")]
    NotRepresentable { x: VertexId, y: VertexId, via: VertexId },
    #[error("vertex {vertex} has degree {degree}; t'-moves need degree 1, 2 or 3")]
    DegreeTooHigh { vertex: VertexId, degree: usize },
    #[error("recorded sign of {x}-{y} does not match the graph")]
    SignMismatch { x: VertexId, y: VertexId },
    #[error("permutation is not a bijection of the vertex set")]
    BadPermutation,
    #[error("replayed moves do not reach the recorded end graph")]
    EndMismatch,
}

/// One step of a reduction transcript.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum MoveRecord {
    /// t-move on edge `(pivot, other)`; `epsilon` is the edge sign before the move.
    #[serde(rename = "tmove")]
    TMove {
        pivot: VertexId,
        other: VertexId,
        #[serde(with = "sign_value")]
        epsilon: Sign,
    },
    Switch {
        vertex: VertexId,
    },
    /// Relabelling: `permutation[i]` is the new id of the `i`-th vertex in
    /// the graph's vertex order. The vertex list itself is unchanged.
    Permute {
        permutation: Vec<VertexId>,
    },
}

mod sign_value {
    use crate::graph::Sign;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(s: &Sign, ser: S) -> Result<S::Ok, S::Error> {
        ser.serialize_i8(s.value() as i8)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Sign, D::Error> {
        let v = i8::deserialize(d)?;
        Sign::from_value(v as i64).ok_or_else(|| serde::de::Error::custom("epsilon must be 1 or -1"))
    }
}

/// Vertices other than `x` adjacent to `y`, with the sign of their edge to `y`.
fn far_neighbours(g: &SignedGraph, x: VertexId, y: VertexId) -> Vec<(VertexId, Sign)> {
    g.neighbors(y)
        .into_iter()
        .filter(|&v| v != x)
        .map(|v| (v, g.sign(y, v).unwrap()))
        .collect()
}

pub fn t_move(g: &SignedGraph, x: VertexId, y: VertexId) -> Result<(SignedGraph, MoveRecord), MoveError> {
    for v in [x, y] {
        if !g.contains(v) {
            return Err(MoveError::UnknownVertex(v));
        }
    }
    let eps = g.sign(x, y).ok_or(MoveError::NoSuchEdge(x, y))?;
    let mut out = g.clone();
    for (v, s_yv) in far_neighbours(g, x, y) {
        // Matrix update: a_xv + (-eps) * a_yv.
        let created = if eps == Sign::Neg { s_yv } else { s_yv.flip() };
        match g.sign(x, v) {
            None => out.set_edge(x, v, Some(created)),
            Some(existing) if existing == created.flip() => out.set_edge(x, v, None),
            Some(_) => return Err(MoveError::NotRepresentable { x, y, via: v }),
        }
    }
    out.set_edge(x, y, Some(eps.flip()));
    Ok((
        out,
        MoveRecord::TMove {
            pivot: x,
            other: y,
            epsilon: eps,
        },
    ))
}

pub fn t_prime_move(g: &SignedGraph, x: VertexId, y: VertexId) -> Result<(SignedGraph, MoveRecord), MoveError> {
    if g.contains(y) && g.has_edge(x, y) {
        let degree = g.degree(y);
        if degree > 3 {
            return Err(MoveError::DegreeTooHigh { vertex: y, degree });
        }
    }
    t_move(g, x, y)
}

/// Relabels `g`: the `i`-th vertex's id becomes `images[i]`.
pub fn permute(g: &SignedGraph, images: &[VertexId]) -> Result<SignedGraph, MoveError> {
    if images.len() != g.order() {
        return Err(MoveError::BadPermutation);
    }
    let mut sorted_old = g.vertices().to_vec();
    let mut sorted_new = images.to_vec();
    sorted_old.sort_unstable();
    sorted_new.sort_unstable();
    if sorted_old != sorted_new {
        return Err(MoveError::BadPermutation);
    }
    let map = |v: VertexId| images[g.index_of(v).unwrap()];
    let mut out = SignedGraph::new(g.vertices().iter().copied()).unwrap();
    for (u, v, s) in g.edges() {
        out.add_edge(map(u), map(v), s)
            .expect("bijection keeps the graph simple");
    }
    Ok(out)
}

pub fn apply_move(g: &SignedGraph, m: &MoveRecord) -> Result<SignedGraph, MoveError> {
    match m {
        MoveRecord::TMove { pivot, other, epsilon } => {
            let (out, rec) = t_move(g, *pivot, *other)?;
            match rec {
                MoveRecord::TMove { epsilon: e, .. } if e == *epsilon => Ok(out),
                _ => Err(MoveError::SignMismatch { x: *pivot, y: *other }),
            }
        }
        MoveRecord::Switch { vertex } => switch(g, *vertex).map_err(|e| MoveError::UnknownVertex(e.0)),
        MoveRecord::Permute { permutation } => permute(g, permutation),
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("move {index}: {source}")]
pub struct ReplayError {
    pub index: usize,
    #[source]
    pub source: MoveError,
}

pub fn apply_transcript(start: &SignedGraph, moves: &[MoveRecord]) -> Result<SignedGraph, ReplayError> {
    let mut cur = start.clone();
    for (index, m) in moves.iter().enumerate() {
        cur = apply_move(&cur, m).map_err(|source| ReplayError { index, source })?;
    }
    Ok(cur)
}

/// A replayable sequence of moves from `start` to `end`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionTranscript {
    pub start: SignedGraph,
    pub moves: Vec<MoveRecord>,
    pub end: SignedGraph,
}

impl ReductionTranscript {
    pub fn empty(start: SignedGraph) -> Self {
        ReductionTranscript {
            end: start.clone(),
            start,
            moves: Vec::new(),
        }
    }

    /// Applies `m` to the current end, appending it on success.
    pub fn push(&mut self, m: MoveRecord) -> Result<(), MoveError> {
        self.end = apply_move(&self.end, &m)?;
        self.moves.push(m);
        Ok(())
    }

    pub fn extend(&mut self, other: &ReductionTranscript) -> Result<(), ReplayError> {
        for (index, m) in other.moves.iter().enumerate() {
            self.push(m.clone()).map_err(|source| ReplayError { index, source })?;
        }
        Ok(())
    }

    pub fn t_move_count(&self) -> usize {
        self.moves
            .iter()
            .filter(|m| matches!(m, MoveRecord::TMove { .. }))
            .count()
    }

    /// Replays from `start` and checks the stored `end`.
    pub fn is_consistent(&self) -> bool {
        apply_transcript(&self.start, &self.moves).is_ok_and(|g| g == self.end)
    }
}

/// Unimodular `U` with `U^T gram(start) U = gram(end)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CongruenceCertificate {
    #[serde(with = "matrix_rows")]
    pub u: IntMatrix,
}

mod matrix_rows {
    use crate::linalg::IntMatrix;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &IntMatrix, s: S) -> Result<S::Ok, S::Error> {
        m.to_rows().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<IntMatrix, D::Error> {
        let rows = Vec::<Vec<i64>>::deserialize(d)?;
        IntMatrix::from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Builds the certificate as an ordered product of elementary matrices,
/// replaying the transcript to resolve vertex indices.
pub fn certificate(t: &ReductionTranscript) -> Result<CongruenceCertificate, ReplayError> {
    let n = t.start.order();
    let mut u = IntMatrix::identity(n);
    let mut cur = t.start.clone();
    for (index, m) in t.moves.iter().enumerate() {
        let next = apply_move(&cur, m).map_err(|source| ReplayError { index, source })?;
        match m {
            MoveRecord::TMove { pivot, other, epsilon } => {
                let j = cur.index_of(*pivot).unwrap();
                let i = cur.index_of(*other).unwrap();
                u.add_column_multiple(j, i, -epsilon.value());
            }
            MoveRecord::Switch { vertex } => u.negate_column(cur.index_of(*vertex).unwrap()),
            MoveRecord::Permute { permutation } => {
                // P[i, sigma(i)] = 1 where sigma(i) is the index of the new id.
                let mut p = IntMatrix::zeros(n, n);
                for (i, image) in permutation.iter().enumerate() {
                    p.set(i, cur.index_of(*image).unwrap(), 1);
                }
                u = u.mul(&p).expect("square");
            }
        }
        cur = next;
    }
    if cur != t.end {
        return Err(ReplayError {
            index: t.moves.len(),
            source: MoveError::EndMismatch,
        });
    }
    Ok(CongruenceCertificate { u })
}

pub fn verify_certificate(m0: &GramMatrix, u: &IntMatrix, m1: &GramMatrix) -> Result<bool, MatrixError> {
    let n = m0.dim();
    if !u.is_square() || u.rows() != n || m1.dim() != n {
        return Err(MatrixError::Dimension(format!(
            "Gram {}x{}, certificate {}x{}, target {}x{}",
            n,
            n,
            u.rows(),
            u.cols(),
            m1.dim(),
            m1.dim()
        )));
    }
    let det = u.det();
    if det != 1.into() && det != (-1).into() {
        return Ok(false);
    }
    Ok(u.congruence(m0.matrix())? == *m1.matrix())
}

impl ReductionTranscript {
    pub fn verify(&self, cert: &CongruenceCertificate) -> Result<bool, MatrixError> {
        verify_certificate(&gram_matrix(&self.start), &cert.u, &gram_matrix(&self.end))
    }
}

/// Serialized transcript with an optional certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TranscriptDocument {
    pub start: SignedGraph,
    pub moves: Vec<MoveRecord>,
    pub end: SignedGraph,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<CongruenceCertificate>,
}

impl TranscriptDocument {
    pub fn new(t: &ReductionTranscript, certificate: Option<CongruenceCertificate>) -> Self {
        TranscriptDocument {
            start: t.start.clone(),
            moves: t.moves.clone(),
            end: t.end.clone(),
            certificate,
        }
    }

    pub fn transcript(&self) -> ReductionTranscript {
        ReductionTranscript {
            start: self.start.clone(),
            moves: self.moves.clone(),
            end: self.end.clone(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Sign::*;

    fn path3() -> SignedGraph {
        SignedGraph::path(3)
    }

    #[test]
    fn single_edge_flips() {
        let g = SignedGraph::path(2);
        for (x, y) in [(0, 1), (1, 0)] {
            let (h, rec) = t_move(&g, x, y).unwrap();
            assert_eq!(h.sign(0, 1), Some(Neg));
            assert_eq!(
                rec,
                MoveRecord::TMove {
                    pivot: x,
                    other: y,
                    epsilon: Pos
                }
            );
        }
    }

    #[test]
    fn path_to_triangle() {
        let (h, _) = t_move(&path3(), 0, 1).unwrap();
        let expected = SignedGraph::on_range(3, [(0, 1, Neg), (1, 2, Pos), (0, 2, Neg)]).unwrap();
        assert_eq!(h, expected);
        assert_eq!(gram_matrix(&h).det(), 4.into());
        assert_eq!(gram_matrix(&path3()).det(), 4.into());
    }

    #[test]
    fn triangle_to_path() {
        let tri = SignedGraph::on_range(3, [(0, 1, Pos), (1, 2, Pos), (0, 2, Neg)]).unwrap();
        // ac is - and eps = +, so the created sign would be -bc = -: cancellation
        // needs existing == +; this triangle has x = 1, n = 3 (same parity).
        assert!(matches!(
            t_move(&tri, 0, 1),
            Err(MoveError::NotRepresentable { via: 2, .. })
        ));

        let all_pos = SignedGraph::cycle(3, 0);
        let (h, _) = t_move(&all_pos, 0, 1).unwrap();
        let expected = SignedGraph::on_range(3, [(0, 1, Neg), (1, 2, Pos)]).unwrap();
        assert_eq!(h, expected);
    }

    #[test]
    fn involution_on_path() {
        let g = path3();
        let t = ReductionTranscript {
            start: g.clone(),
            moves: vec![
                MoveRecord::TMove {
                    pivot: 0,
                    other: 1,
                    epsilon: Pos,
                },
                MoveRecord::TMove {
                    pivot: 0,
                    other: 1,
                    epsilon: Neg,
                },
            ],
            end: g.clone(),
        };
        assert_eq!(apply_transcript(&g, &t.moves).unwrap(), g);
        assert!(t.is_consistent());
    }

    #[test]
    fn t_prime_degree_guard() {
        let star = SignedGraph::star(4);
        assert_eq!(
            t_prime_move(&star, 1, 0),
            Err(MoveError::DegreeTooHigh { vertex: 0, degree: 4 })
        );
        let (h, _) = t_prime_move(&path3(), 0, 1).unwrap();
        assert_eq!(h, t_move(&path3(), 0, 1).unwrap().0);
        let (e, _) = t_prime_move(&SignedGraph::path(2), 1, 0).unwrap();
        assert_eq!(e.sign(0, 1), Some(Neg));
    }

    #[test]
    fn errors() {
        assert_eq!(t_move(&path3(), 0, 2), Err(MoveError::NoSuchEdge(0, 2)));
        assert_eq!(t_move(&path3(), 0, 9), Err(MoveError::UnknownVertex(9)));
        let bad = [
            MoveRecord::Switch { vertex: 1 },
            MoveRecord::TMove {
                pivot: 0,
                other: 2,
                epsilon: Pos,
            },
        ];
        let err = apply_transcript(&path3(), &bad).unwrap_err();
        assert_eq!(err.index, 1);
    }

    #[test]
    fn extra_isolated_vertex_is_untouched() {
        let tri = SignedGraph::cycle(3, 0);
        let mut big = SignedGraph::new([0, 1, 2, 3]).unwrap();
        for (u, v, s) in tri.edges() {
            big.add_edge(u, v, s).unwrap();
        }
        let moves = vec![MoveRecord::TMove {
            pivot: 0,
            other: 1,
            epsilon: Pos,
        }];
        let small = apply_transcript(&tri, &moves).unwrap();
        let large = apply_transcript(&big, &moves).unwrap();
        assert_eq!(large.induced(&[0, 1, 2]), small);
        assert_eq!(large.degree(3), 0);
    }

    #[test]
    fn certificate_examples() {
        let g = SignedGraph::path(4);
        let empty = certificate(&ReductionTranscript::empty(g)).unwrap();
        assert_eq!(empty.u, IntMatrix::identity(4));

        let mut t = ReductionTranscript::empty(SignedGraph::path(2));
        t.push(MoveRecord::TMove {
            pivot: 1,
            other: 0,
            epsilon: Pos,
        })
        .unwrap();
        let c = certificate(&t).unwrap();
        assert_eq!(c.u.to_rows(), vec![vec![1, -1], vec![0, 1]]);
        assert_eq!(
            c.u.congruence(gram_matrix(&t.start).matrix()).unwrap().to_rows(),
            vec![vec![2, -1], vec![-1, 2]]
        );
        assert_eq!(t.verify(&c), Ok(true));

        let mut t = ReductionTranscript::empty(SignedGraph::cycle(3, 0));
        t.push(MoveRecord::TMove {
            pivot: 0,
            other: 1,
            epsilon: Pos,
        })
        .unwrap();
        t.push(MoveRecord::Switch { vertex: 1 }).unwrap();
        t.push(MoveRecord::Permute {
            permutation: vec![1, 0, 2],
        })
        .unwrap();
        let c = certificate(&t).unwrap();
        assert_eq!(t.verify(&c), Ok(true));
        assert!(t.end.is_tree());
    }

    #[test]
    fn verify_certificate_cases() {
        let m = gram_matrix(&SignedGraph::path(3));
        let other = gram_matrix(&SignedGraph::cycle(3, 0));
        let id = IntMatrix::identity(3);
        assert_eq!(verify_certificate(&m, &id, &m), Ok(true));
        assert_eq!(verify_certificate(&m, &id, &other), Ok(false));
        let doubled = IntMatrix::from_rows(&[vec![2, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]).unwrap();
        assert_eq!(verify_certificate(&m, &doubled, &m), Ok(false));
        assert!(verify_certificate(&m, &IntMatrix::identity(2), &m).is_err());
    }

    #[test]
    fn document_round_trip() {
        let mut t = ReductionTranscript::empty(SignedGraph::cycle(3, 0));
        t.push(MoveRecord::TMove {
            pivot: 0,
            other: 1,
            epsilon: Pos,
        })
        .unwrap();
        t.push(MoveRecord::Permute {
            permutation: vec![2, 0, 1],
        })
        .unwrap();
        let doc = TranscriptDocument::new(&t, Some(certificate(&t).unwrap()));
        let json = serde_json::to_string_pretty(&doc).unwrap();
        assert!(json.contains("\"kind\": \"tmove\""));
        assert!(json.contains("\"epsilon\": 1"));
        let back: TranscriptDocument = serde_json::from_str(&json).unwrap();
        assert_eq!(back, doc);
    }
}
