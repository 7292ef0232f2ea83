//! Reduction of positive signed graphs to simply laced Dynkin diagrams.
//!
//! The search runs on unsigned adjacency: on a positive graph every t-move
//! is representable and the underlying graph after a move depends only on
//! the underlying graph before it, so a move sequence found without signs
//! replays verbatim on the signed graph. The graph is grown one vertex at a
//! time along a peel order; after each insertion a best-first search turns
//! the grown prefix back into a tree, which is then an ADE diagram.

use std::cmp::Reverse;
use std::collections::{BinaryHeap, HashSet};
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::certificates::{
    all_induced_cycles_positive, default_catalog, find_forbidden_minor, CycleReport, CycleVerdict, MinorCertificate,
    DEFAULT_CYCLE_BOUND,
};
use crate::graph::{Sign, SignedGraph, VertexId};
use crate::linalg::{definiteness, gram_matrix, inertia, DefinitenessReport, Inertia};
use crate::moves::{certificate, t_move, CongruenceCertificate, MoveError, MoveRecord, ReductionTranscript};
use crate::switching::tree_normalize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum AdeFamily {
    A,
    D,
    E,
}

/// A simply laced Dynkin type. Serialized as e.g. `"D_5"`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AdeType {
    pub family: AdeFamily,
    pub rank: usize,
}

impl AdeType {
    pub fn new(family: AdeFamily, rank: usize) -> Option<Self> {
        let ok = match family {
            AdeFamily::A => rank >= 1,
            AdeFamily::D => rank >= 4,
            AdeFamily::E => (6..=8).contains(&rank),
        };
        ok.then_some(AdeType { family, rank })
    }

    /// The unique type with `rank` vertices and Gram determinant `det`.
    pub fn from_rank_det(rank: usize, det: &BigInt) -> Option<Self> {
        let d = i64::try_from(det).ok()?;
        [
            AdeType::new(AdeFamily::A, rank),
            AdeType::new(AdeFamily::D, rank),
            AdeType::new(AdeFamily::E, rank),
        ]
        .into_iter()
        .flatten()
        .find(|t| expected_det(*t) == d)
    }

    /// The diagram on vertices `0..rank`, all edges positive: `A_n` is the
    /// path `0..n`; `D_n` and `E_n` are the path `0..n-1` with vertex `n - 1`
    /// attached to vertex 1 or 2 respectively.
    pub fn diagram(&self) -> SignedGraph {
        let n = self.rank;
        let mut edges: Vec<(VertexId, VertexId, Sign)> = Vec::new();
        let path_len = if self.family == AdeFamily::A { n } else { n - 1 };
        for i in 1..path_len {
            edges.push((i as VertexId - 1, i as VertexId, Sign::Pos));
        }
        match self.family {
            AdeFamily::A => {}
            AdeFamily::D => edges.push((1, n as VertexId - 1, Sign::Pos)),
            AdeFamily::E => edges.push((2, n as VertexId - 1, Sign::Pos)),
        }
        SignedGraph::on_range(n, edges).expect("diagram is simple")
    }
}

pub fn expected_det(t: AdeType) -> i64 {
    match (t.family, t.rank) {
        (AdeFamily::A, n) => n as i64 + 1,
        (AdeFamily::D, _) => 4,
        (AdeFamily::E, 6) => 3,
        (AdeFamily::E, 7) => 2,
        (AdeFamily::E, _) => 1,
    }
}

impl fmt::Display for AdeType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}_{}", self.family, self.rank)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("not an ADE type: {0:?}")]
pub struct BadAdeType(pub String);

impl FromStr for AdeType {
    type Err = BadAdeType;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BadAdeType(s.to_string());
        let mut chars = s.chars();
        let family = match chars.next() {
            Some('A') => AdeFamily::A,
            Some('D') => AdeFamily::D,
            Some('E') => AdeFamily::E,
            _ => return Err(bad()),
        };
        let rest = chars.as_str();
        let rank = rest.strip_prefix('_').unwrap_or(rest).parse().map_err(|_| bad())?;
        AdeType::new(family, rank).ok_or_else(bad)
    }
}

impl Serialize for AdeType {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for AdeType {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

/// A graph recognised as a diagram: `vertex_map[k]` is the graph vertex
/// playing diagram vertex `k` (see [`AdeType::diagram`]).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdeMatch {
    pub ade: AdeType,
    pub vertex_map: Vec<VertexId>,
}

/// Walks from `start` away from `from` until a vertex of degree other than 2.
fn arm(g: &SignedGraph, from: VertexId, start: VertexId) -> Vec<VertexId> {
    let mut out = vec![start];
    let (mut prev, mut cur) = (from, start);
    while g.degree(cur) == 2 {
        let next = g.neighbors(cur).into_iter().find(|&w| w != prev).unwrap();
        out.push(next);
        prev = cur;
        cur = next;
    }
    out
}

/// Recognises the underlying graph of `g` as an ADE diagram, signs ignored.
pub fn recognize_ade(g: &SignedGraph) -> Option<AdeMatch> {
    let n = g.order();
    if n == 0 || !g.is_tree() {
        return None;
    }
    if n == 1 {
        return Some(AdeMatch {
            ade: AdeType::new(AdeFamily::A, 1)?,
            vertex_map: g.vertices().to_vec(),
        });
    }
    let branch: Vec<VertexId> = g.vertices().iter().copied().filter(|&v| g.degree(v) > 2).collect();
    match branch[..] {
        [] => {
            let end = g.vertices().iter().copied().filter(|&v| g.degree(v) == 1).min()?;
            let next = g.neighbors(end)[0];
            let mut map = vec![end];
            map.extend(arm(g, end, next));
            Some(AdeMatch {
                ade: AdeType::new(AdeFamily::A, n)?,
                vertex_map: map,
            })
        }
        [hub] if g.degree(hub) == 3 => {
            let mut arms: Vec<Vec<VertexId>> = g.neighbors(hub).into_iter().map(|v| arm(g, hub, v)).collect();
            arms.sort_by_key(|a| (a.len(), a[0]));
            let lens: Vec<usize> = arms.iter().map(Vec::len).collect();
            let (family, short, mid, long) = match lens[..] {
                [1, 1, 1] => (AdeFamily::D, &arms[2], &arms[0], &arms[1]),
                [1, 1, _] => (AdeFamily::D, &arms[1], &arms[0], &arms[2]),
                [1, 2, 2] | [1, 2, 3] | [1, 2, 4] => (AdeFamily::E, &arms[0], &arms[1], &arms[2]),
                _ => return None,
            };
            // Path: mid reversed, hub, long; then the short arm's leaf.
            let mut map: Vec<VertexId> = mid.iter().rev().copied().collect();
            map.push(hub);
            map.extend(long.iter().copied());
            map.extend(short.iter().copied());
            Some(AdeMatch {
                ade: AdeType::new(family, n)?,
                vertex_map: map,
            })
        }
        _ => None,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReduceMode {
    /// Any t-move.
    #[default]
    T,
    /// t-moves whose non-pivot endpoint has degree at most 3.
    TPrime,
}

impl FromStr for ReduceMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "t" => Ok(ReduceMode::T),
            "tprime" => Ok(ReduceMode::TPrime),
            _ => Err(format!("unknown mode {s:?} (expected t or tprime)")),
        }
    }
}

/// Bounds on each best-first search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchLimits {
    pub depth: usize,
    pub nodes: usize,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            depth: 25,
            nodes: 200_000,
        }
    }
}

/// Checkable evidence that a graph is not positive.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonPositive {
    pub report: DefinitenessReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cycle: Option<CycleReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minor: Option<MinorCertificate>,
}

impl NonPositive {
    fn of(g: &SignedGraph, report: DefinitenessReport) -> Self {
        let cycle = if g.order() <= DEFAULT_CYCLE_BOUND {
            match all_induced_cycles_positive(g) {
                Ok(CycleVerdict::Failing(c)) => Some(c),
                _ => None,
            }
        } else {
            None
        };
        NonPositive {
            report,
            cycle,
            minor: find_forbidden_minor(g, default_catalog()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Reduction {
    pub ade: AdeType,
    pub transcript: ReductionTranscript,
    pub certificate: CongruenceCertificate,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum ReductionResult {
    Ade(Box<Reduction>),
    NonPositive(Box<NonPositive>),
}

impl ReductionResult {
    pub fn ade(&self) -> Option<&Reduction> {
        match self {
            ReductionResult::Ade(r) => Some(r),
            ReductionResult::NonPositive(_) => None,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReduceError {
    #[error("graph is not connected")]
    Disconnected,
    #[error("graph is empty")]
    Empty,
    #[error("graph has {0} vertices; reduction of non-trees is limited to 128")]
    TooLarge(usize),
    #[error("graph is not positive")]
    NotPositive(Box<NonPositive>),
    /// Every state reachable by the allowed moves was explored; for t'-moves
    /// this happens on positive graphs that are not checkerboard graphs.
    #[error("no allowed move sequence succeeds in {stage} ({explored} states explored)")]
    Unreachable { stage: String, explored: usize },
    #[error("search exhausted while {stage} ({explored} states explored)")]
    SearchExhausted { stage: String, explored: usize },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("internal error replaying a found move: {0}")]
    Replay(#[from] MoveError),
}

/// Vertex order in which every prefix induces a connected subgraph:
/// repeatedly delete the largest-id vertex whose removal keeps the rest
/// connected, then reverse.
pub fn peel_order(g: &SignedGraph) -> Result<Vec<VertexId>, ReduceError> {
    if g.order() == 0 {
        return Ok(Vec::new());
    }
    if !g.is_connected() {
        return Err(ReduceError::Disconnected);
    }
    let mut rest: Vec<VertexId> = g.vertices().to_vec();
    rest.sort_unstable();
    let mut removed = Vec::with_capacity(rest.len());
    while rest.len() > 1 {
        let pos = (0..rest.len())
            .rev()
            .find(|&i| {
                let mut keep = rest.clone();
                keep.remove(i);
                g.induced(&keep).is_connected()
            })
            .expect("every connected graph has a non-cut vertex");
        removed.push(rest.remove(pos));
    }
    removed.push(rest[0]);
    removed.reverse();
    Ok(removed)
}

/// Unsigned adjacency as bit rows, indexed by the graph's vertex order.
type Rows = Vec<u128>;

fn rows_of(g: &SignedGraph) -> Rows {
    let mut rows = vec![0u128; g.order()];
    for (u, v, _) in g.edges() {
        let (i, j) = (g.index_of(u).unwrap(), g.index_of(v).unwrap());
        rows[i] |= 1 << j;
        rows[j] |= 1 << i;
    }
    rows
}

/// The underlying effect of a t-move with pivot `x` on edge `(x, y)`.
fn apply_unsigned(rows: &mut [u128], x: usize, y: usize) {
    let toggle = rows[y] & !(1u128 << x);
    let mut t = toggle;
    while t != 0 {
        let v = t.trailing_zeros() as usize;
        t &= t - 1;
        rows[v] ^= 1 << x;
    }
    rows[x] ^= toggle;
}

fn edges_within(rows: &[u128], mask: u128) -> u32 {
    let mut m = mask;
    let mut total = 0;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        total += (rows[v] & mask).count_ones();
    }
    total / 2
}

fn max_degree_within(rows: &[u128], mask: u128) -> u32 {
    let mut m = mask;
    let mut best = 0;
    while m != 0 {
        let v = m.trailing_zeros() as usize;
        m &= m - 1;
        best = best.max((rows[v] & mask).count_ones());
    }
    best
}

/// A search that ended without reaching its goal. `complete` means every
/// reachable state was explored, so no move sequence reaches the goal.
struct Exhausted {
    explored: usize,
    complete: bool,
}

#[derive(Clone, Copy)]
enum Goal {
    /// The induced subgraph on the mask is a tree.
    Tree,
    /// Every vertex has degree at most 3.
    SubCubic,
}

struct Search<'a> {
    order: &'a [usize],
    mode: ReduceMode,
    limits: SearchLimits,
}

impl Search<'_> {
    fn reached(&self, rows: &[u128], mask: u128, goal: Goal) -> bool {
        match goal {
            Goal::Tree => edges_within(rows, mask) + 1 == mask.count_ones(),
            Goal::SubCubic => rows.iter().all(|r| r.count_ones() <= 3),
        }
    }

    fn score(&self, rows: &[u128], mask: u128, goal: Goal) -> (u32, u32) {
        match goal {
            Goal::Tree => (edges_within(rows, mask), max_degree_within(rows, mask)),
            Goal::SubCubic => {
                let excess = rows.iter().map(|r| r.count_ones().saturating_sub(3)).sum();
                (excess, edges_within(rows, mask))
            }
        }
    }

    /// Best-first search over moves with both endpoints in `mask`; ties are
    /// broken by the position of the move in `(pivot, other)` order, then
    /// by insertion order, so the result is deterministic.
    fn run(&self, start: &[u128], mask: u128, goal: Goal) -> Result<Vec<(usize, usize)>, Exhausted> {
        if self.reached(start, mask, goal) {
            return Ok(Vec::new());
        }
        // Node: rows, parent, move, depth.
        let mut nodes: Vec<(Rows, usize, (usize, usize), usize)> = vec![(start.to_vec(), usize::MAX, (0, 0), 0)];
        let mut seen: HashSet<Rows> = HashSet::from([start.to_vec()]);
        let mut heap = BinaryHeap::from([Reverse((self.score(start, mask, goal), 0usize))]);
        let members: Vec<usize> = self.order.iter().copied().filter(|&v| mask >> v & 1 == 1).collect();
        let mut complete = true;
        while let Some(Reverse((_, id))) = heap.pop() {
            if nodes.len() > self.limits.nodes {
                complete = false;
                break;
            }
            let depth = nodes[id].3;
            if depth >= self.limits.depth {
                complete = false;
                continue;
            }
            for &x in &members {
                for &y in &members {
                    let rows = &nodes[id].0;
                    if rows[x] >> y & 1 == 0 {
                        continue;
                    }
                    if self.mode == ReduceMode::TPrime && rows[y].count_ones() > 3 {
                        continue;
                    }
                    let mut next = rows.clone();
                    apply_unsigned(&mut next, x, y);
                    if !seen.insert(next.clone()) {
                        continue;
                    }
                    let done = self.reached(&next, mask, goal);
                    let score = self.score(&next, mask, goal);
                    nodes.push((next, id, (x, y), depth + 1));
                    let child = nodes.len() - 1;
                    if done {
                        let mut path = Vec::new();
                        let mut cur = child;
                        while cur != 0 {
                            path.push(nodes[cur].2);
                            cur = nodes[cur].1;
                        }
                        path.reverse();
                        return Ok(path);
                    }
                    heap.push(Reverse((score, child)));
                }
            }
        }
        Err(Exhausted {
            explored: nodes.len(),
            complete,
        })
    }
}

fn exhausted(e: Exhausted, stage: &str) -> ReduceError {
    if e.complete {
        ReduceError::Unreachable {
            stage: stage.to_string(),
            explored: e.explored,
        }
    } else {
        ReduceError::SearchExhausted {
            stage: stage.to_string(),
            explored: e.explored,
        }
    }
}

/// Index order of vertices sorted by id, for deterministic tie-breaking.
fn id_order(g: &SignedGraph) -> Vec<usize> {
    let mut order: Vec<usize> = (0..g.order()).collect();
    order.sort_by_key(|&i| g.vertices()[i]);
    order
}

/// Replays index moves on the signed graph, appending t-move records.
fn replay(t: &mut ReductionTranscript, moves: &[(usize, usize)]) -> Result<(), ReduceError> {
    for &(x, y) in moves {
        let ids = t.end.vertices();
        let (_, rec) = t_move(&t.end, ids[x], ids[y])?;
        t.push(rec)?;
    }
    Ok(())
}

fn switch_all(t: &mut ReductionTranscript, switches: Vec<VertexId>) -> Result<(), ReduceError> {
    for v in switches {
        t.push(MoveRecord::Switch { vertex: v })?;
    }
    Ok(())
}

/// Positivity gate shared by the reduction entry points.
pub(crate) fn gate(g: &SignedGraph) -> Result<(), ReduceError> {
    if g.order() == 0 {
        return Err(ReduceError::Empty);
    }
    if !g.is_connected() {
        return Err(ReduceError::Disconnected);
    }
    let report = definiteness(&gram_matrix(g));
    if !report.is_positive_definite() {
        return Err(ReduceError::NotPositive(Box::new(NonPositive::of(g, report))));
    }
    if g.order() > 128 && !g.is_tree() {
        return Err(ReduceError::TooLarge(g.order()));
    }
    Ok(())
}

/// Moves a positive connected graph to one of maximum degree at most 3.
pub fn degree_normalize(g: &SignedGraph, mode: ReduceMode) -> Result<ReductionTranscript, ReduceError> {
    gate(g)?;
    let mut t = ReductionTranscript::empty(g.clone());
    if g.max_degree() <= 3 {
        return Ok(t);
    }
    let (_, switches) = tree_normalize(g);
    switch_all(&mut t, switches)?;
    let order = id_order(g);
    let search = Search {
        order: &order,
        mode,
        limits: SearchLimits::default(),
    };
    let full = all_mask(g.order());
    let moves = search
        .run(&rows_of(&t.end), full, Goal::SubCubic)
        .map_err(|e| exhausted(e, "lowering degrees"))?;
    replay(&mut t, &moves)?;
    Ok(t)
}

fn all_mask(n: usize) -> u128 {
    if n >= 128 {
        u128::MAX
    } else {
        (1u128 << n) - 1
    }
}

pub fn reduce_to_ade(g: &SignedGraph, mode: ReduceMode) -> Result<ReductionResult, ReduceError> {
    reduce_with_limits(g, mode, SearchLimits::default())
}

pub fn reduce_with_limits(
    g: &SignedGraph,
    mode: ReduceMode,
    limits: SearchLimits,
) -> Result<ReductionResult, ReduceError> {
    match gate(g) {
        Err(ReduceError::NotPositive(np)) => return Ok(ReductionResult::NonPositive(np)),
        other => other?,
    }
    let mut t = ReductionTranscript::empty(g.clone());
    if !g.is_tree() {
        let (_, switches) = tree_normalize(g);
        switch_all(&mut t, switches)?;
        let moves = find_tree_moves(&t.end, mode, limits)?;
        replay(&mut t, &moves)?;
    }
    finish(t)
}

/// Index moves turning the (positive, connected) graph into a tree.
fn find_tree_moves(
    g: &SignedGraph,
    mode: ReduceMode,
    limits: SearchLimits,
) -> Result<Vec<(usize, usize)>, ReduceError> {
    let order = id_order(g);
    let search = Search {
        order: &order,
        mode,
        limits,
    };
    let start = rows_of(g);
    let peel = peel_order(g)?;
    let mut rows = start.clone();
    let mut moves = Vec::new();
    let mut mask = 0u128;
    let mut incremental = true;
    for &v in &peel {
        mask |= 1 << g.index_of(v).unwrap();
        if mask.count_ones() < 3 {
            continue;
        }
        match search.run(&rows, mask, Goal::Tree) {
            Ok(found) => {
                for &(x, y) in &found {
                    apply_unsigned(&mut rows, x, y);
                }
                moves.extend(found);
            }
            Err(_) => {
                incremental = false;
                break;
            }
        }
    }
    if incremental {
        return Ok(moves);
    }
    let global = Search {
        order: &order,
        mode,
        limits: SearchLimits {
            depth: usize::MAX,
            nodes: limits.nodes * 5,
        },
    };
    global
        .run(&start, all_mask(g.order()), Goal::Tree)
        .map_err(|e| exhausted(e, "reducing to a tree"))
}

/// Switches the reached tree positive and relabels it onto the canonical
/// diagram, then certifies the whole transcript.
pub(crate) fn finish(mut t: ReductionTranscript) -> Result<ReductionResult, ReduceError> {
    let (_, switches) = tree_normalize(&t.end);
    switch_all(&mut t, switches)?;
    let m = recognize_ade(&t.end).expect("a positive tree is an ADE diagram");
    let mut sorted: Vec<VertexId> = t.end.vertices().to_vec();
    sorted.sort_unstable();
    let images: Vec<VertexId> = t
        .end
        .vertices()
        .iter()
        .map(|v| sorted[m.vertex_map.iter().position(|w| w == v).unwrap()])
        .collect();
    if images != t.end.vertices() {
        t.push(MoveRecord::Permute { permutation: images })?;
    }
    let cert = certificate(&t).map_err(|e| ReduceError::Replay(e.source))?;
    Ok(ReductionResult::Ade(Box::new(Reduction {
        ade: m.ade,
        transcript: t,
        certificate: cert,
    })))
}

/// Componentwise reduction; results follow the order of
/// [`SignedGraph::components`].
pub fn reduce_forest(g: &SignedGraph, mode: ReduceMode) -> Result<Vec<ReductionResult>, ReduceError> {
    g.components()
        .iter()
        .map(|c| reduce_to_ade(&g.induced(c), mode))
        .collect()
}

/// Everything known about a signed graph's Gram form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Classification {
    pub order: usize,
    pub definiteness: DefinitenessReport,
    #[serde(with = "crate::linalg::bigint_serde")]
    pub det: BigInt,
    pub inertia: Inertia,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failing_cycle: Option<CycleReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub minor: Option<MinorCertificate>,
    /// One type per connected component, when positive.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ade: Vec<AdeType>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

pub fn classify(g: &SignedGraph) -> Classification {
    let m = gram_matrix(g);
    let report = definiteness(&m);
    let mut out = Classification {
        order: g.order(),
        det: m.det(),
        inertia: inertia(&m),
        failing_cycle: None,
        minor: None,
        ade: Vec::new(),
        error: None,
        definiteness: report.clone(),
    };
    if !report.is_positive_definite() {
        let np = NonPositive::of(g, report);
        out.failing_cycle = np.cycle;
        out.minor = np.minor;
        return out;
    }
    match reduce_forest(g, ReduceMode::T) {
        Ok(results) => out.ade = results.iter().filter_map(|r| r.ade().map(|r| r.ade)).collect(),
        Err(e) => out.error = Some(e.to_string()),
    }
    out
}
