//! Signed graph value type and its line-oriented text format.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type VertexId = u32;

/// Edge label of a signed graph.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sign {
    Pos,
    Neg,
}

impl Sign {
    pub fn value(self) -> i64 {
        match self {
            Sign::Pos => 1,
            Sign::Neg => -1,
        }
    }

    pub fn from_value(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Pos),
            -1 => Some(Sign::Neg),
            _ => None,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Pos => Sign::Neg,
            Sign::Neg => Sign::Pos,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            Sign::Pos => '+',
            Sign::Neg => '-',
        }
    }
}

impl std::ops::Mul for Sign {
    type Output = Sign;
    fn mul(self, rhs: Sign) -> Sign {
        if self == rhs {
            Sign::Pos
        } else {
            Sign::Neg
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("vertex {0} listed twice")]
    DuplicateVertex(VertexId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("self-loop at vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {0}-{1}")]
    DuplicateEdge(VertexId, VertexId),
}

/// Errors from the text front-end. Syntax problems and structural
/// violations are kept apart so callers can map them to distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: {source}")]
    Invalid {
        line: usize,
        #[source]
        source: GraphError,
    },
}

impl ParseError {
    pub(crate) fn syntax(line: usize, message: impl Into<String>) -> Self {
        ParseError::Syntax {
            line,
            message: message.into(),
        }
    }
}

fn key(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

/// A finite simple graph whose edges carry a sign.
///
/// Vertex ids are kept in insertion order; that order is the row/column
/// order of every matrix derived from the graph.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct SignedGraph {
    vertices: Vec<VertexId>,
    edges: BTreeMap<(VertexId, VertexId), Sign>,
}

impl SignedGraph {
    pub fn new(vertices: impl IntoIterator<Item = VertexId>) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        let mut list = Vec::new();
        for v in vertices {
            if !seen.insert(v) {
                return Err(GraphError::DuplicateVertex(v));
            }
            list.push(v);
        }
        Ok(SignedGraph {
            vertices: list,
            edges: BTreeMap::new(),
        })
    }

    pub fn with_edges(
        vertices: impl IntoIterator<Item = VertexId>,
        edges: impl IntoIterator<Item = (VertexId, VertexId, Sign)>,
    ) -> Result<Self, GraphError> {
        let mut g = SignedGraph::new(vertices)?;
        for (u, v, s) in edges {
            g.add_edge(u, v, s)?;
        }
        Ok(g)
    }

    /// Vertices `0..n` with the given edges.
    pub fn on_range(n: usize, edges: impl IntoIterator<Item = (VertexId, VertexId, Sign)>) -> Result<Self, GraphError> {
        Self::with_edges(0..n as VertexId, edges)
    }

    pub fn path(n: usize) -> Self {
        let edges = (1..n as VertexId).map(|i| (i - 1, i, Sign::Pos));
        Self::on_range(n, edges).expect("path is simple")
    }

    /// Cycle on `n >= 3` vertices; the first `negative` edges are negative.
    pub fn cycle(n: usize, negative: usize) -> Self {
        assert!(n >= 3, "cycles need at least three vertices");
        let edges = (0..n as VertexId).map(|i| {
            let s = if (i as usize) < negative { Sign::Neg } else { Sign::Pos };
            (i, (i + 1) % n as VertexId, s)
        });
        Self::on_range(n, edges).expect("cycle is simple")
    }

    /// Star with hub `0` and `leaves` leaves.
    pub fn star(leaves: usize) -> Self {
        let edges = (1..=leaves as VertexId).map(|i| (0, i, Sign::Pos));
        Self::on_range(leaves + 1, edges).expect("star is simple")
    }

    pub fn add_edge(&mut self, u: VertexId, v: VertexId, s: Sign) -> Result<(), GraphError> {
        if u == v {
            return Err(GraphError::SelfLoop(u));
        }
        for w in [u, v] {
            if !self.contains(w) {
                return Err(GraphError::UnknownVertex(w));
            }
        }
        let k = key(u, v);
        if self.edges.contains_key(&k) {
            return Err(GraphError::DuplicateEdge(k.0, k.1));
        }
        self.edges.insert(k, s);
        Ok(())
    }

    pub(crate) fn set_edge(&mut self, u: VertexId, v: VertexId, s: Option<Sign>) {
        debug_assert!(u != v);
        match s {
            Some(s) => {
                self.edges.insert(key(u, v), s);
            }
            None => {
                self.edges.remove(&key(u, v));
            }
        }
    }

    pub fn vertices(&self) -> &[VertexId] {
        &self.vertices
    }

    pub fn order(&self) -> usize {
        self.vertices.len()
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }

    pub fn contains(&self, v: VertexId) -> bool {
        self.vertices.contains(&v)
    }

    pub fn index_of(&self, v: VertexId) -> Option<usize> {
        self.vertices.iter().position(|&w| w == v)
    }

    /// Edges as `(u, v, sign)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (VertexId, VertexId, Sign)> + '_ {
        self.edges.iter().map(|(&(u, v), &s)| (u, v, s))
    }

    pub fn sign(&self, u: VertexId, v: VertexId) -> Option<Sign> {
        self.edges.get(&key(u, v)).copied()
    }

    pub fn has_edge(&self, u: VertexId, v: VertexId) -> bool {
        self.edges.contains_key(&key(u, v))
    }

    /// Neighbours of `v` in ascending id order.
    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let mut out: Vec<VertexId> = self
            .edges
            .keys()
            .filter_map(|&(a, b)| {
                if a == v {
                    Some(b)
                } else if b == v {
                    Some(a)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.edges.keys().filter(|&&(a, b)| a == v || b == v).count()
    }

    pub fn max_degree(&self) -> usize {
        let mut deg: BTreeMap<VertexId, usize> = BTreeMap::new();
        for &(a, b) in self.edges.keys() {
            *deg.entry(a).or_default() += 1;
            *deg.entry(b).or_default() += 1;
        }
        deg.values().copied().max().unwrap_or(0)
    }

    pub fn negative_edges(&self) -> usize {
        self.edges.values().filter(|&&s| s == Sign::Neg).count()
    }

    /// Same vertex set and edges, all signs forgotten (set to `+`).
    pub fn underlying(&self) -> SignedGraph {
        SignedGraph {
            vertices: self.vertices.clone(),
            edges: self.edges.keys().map(|&k| (k, Sign::Pos)).collect(),
        }
    }

    pub fn same_underlying(&self, other: &SignedGraph) -> bool {
        self.vertices == other.vertices && self.edges.keys().eq(other.edges.keys())
    }

    /// Induced subgraph; vertex order follows `keep`.
    pub fn induced(&self, keep: &[VertexId]) -> SignedGraph {
        let set: BTreeSet<VertexId> = keep.iter().copied().collect();
        SignedGraph {
            vertices: keep.iter().copied().filter(|v| self.contains(*v)).collect(),
            edges: self
                .edges
                .iter()
                .filter(|(&(a, b), _)| set.contains(&a) && set.contains(&b))
                .map(|(&k, &s)| (k, s))
                .collect(),
        }
    }

    /// Same graph with the vertex list reordered (must be a permutation).
    pub fn reordered(&self, order: &[VertexId]) -> SignedGraph {
        debug_assert_eq!(order.len(), self.vertices.len());
        SignedGraph {
            vertices: order.to_vec(),
            edges: self.edges.clone(),
        }
    }

    /// Connected components, each listed in the graph's vertex order.
    pub fn components(&self) -> Vec<Vec<VertexId>> {
        let mut comp: BTreeMap<VertexId, usize> = BTreeMap::new();
        let mut count = 0;
        for &s in &self.vertices {
            if comp.contains_key(&s) {
                continue;
            }
            let mut queue = VecDeque::from([s]);
            comp.insert(s, count);
            while let Some(v) = queue.pop_front() {
                for w in self.neighbors(v) {
                    if let std::collections::btree_map::Entry::Vacant(e) = comp.entry(w) {
                        e.insert(count);
                        queue.push_back(w);
                    }
                }
            }
            count += 1;
        }
        let mut out = vec![Vec::new(); count];
        for &v in &self.vertices {
            out[comp[&v]].push(v);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() <= 1
    }

    pub fn is_tree(&self) -> bool {
        self.order() > 0 && self.size() + 1 == self.order() && self.is_connected()
    }

    /// Renders the graph in the `graph signed` text format.
    pub fn to_text(&self) -> String {
        let mut s = String::from("graph signed\n");
        for v in &self.vertices {
            s.push_str(&format!("v {v}\n"));
        }
        for (u, v, sign) in self.edges() {
            s.push_str(&format!("e {u} {v} {}\n", sign.symbol()));
        }
        s
    }

    pub fn parse(text: &str) -> Result<SignedGraph, ParseError> {
        let mut g = SignedGraph::default();
        let mut header = false;
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            if !header {
                if toks != ["graph", "signed"] {
                    return Err(ParseError::syntax(line, "expected header `graph signed`"));
                }
                header = true;
                continue;
            }
            parse_graph_line(&mut g, &toks, line)?
                .then_some(())
                .ok_or_else(|| ParseError::syntax(line, format!("unknown directive `{}`", toks[0])))?;
        }
        if !header {
            return Err(ParseError::syntax(1, "missing header `graph signed`"));
        }
        Ok(g)
    }
}

/// Handles `v` and `e` lines; returns `Ok(false)` for any other directive so
/// richer formats can layer on top.
pub(crate) fn parse_graph_line(g: &mut SignedGraph, toks: &[&str], line: usize) -> Result<bool, ParseError> {
    match toks[0] {
        "v" => {
            if toks.len() != 2 {
                return Err(ParseError::syntax(line, "expected `v <id>`"));
            }
            let v = parse_id(toks[1], line)?;
            if g.contains(v) {
                return Err(ParseError::Invalid {
                    line,
                    source: GraphError::DuplicateVertex(v),
                });
            }
            g.vertices.push(v);
            Ok(true)
        }
        "e" => {
            if toks.len() != 4 {
                return Err(ParseError::syntax(line, "expected `e <u> <v> <+|->`"));
            }
            let u = parse_id(toks[1], line)?;
            let v = parse_id(toks[2], line)?;
            let s = match toks[3] {
                "+" | "+1" => Sign::Pos,
                "-" | "-1" | "\u{2212}" => Sign::Neg,
                other => return Err(ParseError::syntax(line, format!("bad sign `{other}`"))),
            };
            g.add_edge(u, v, s)
                .map_err(|source| ParseError::Invalid { line, source })?;
            Ok(true)
        }
        _ => Ok(false),
    }
}

pub(crate) fn parse_id(tok: &str, line: usize) -> Result<VertexId, ParseError> {
    tok.parse::<VertexId>()
        .map_err(|_| ParseError::syntax(line, format!("bad vertex id `{tok}`")))
}

impl FromStr for SignedGraph {
    type Err = ParseError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        SignedGraph::parse(s)
    }
}

impl fmt::Debug for SignedGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SignedGraph{{V={:?}, E=[", self.vertices)?;
        for (i, (u, v, s)) in self.edges().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{u}{}{v}", s.symbol())?;
        }
        write!(f, "]}}")
    }
}

/// Serializes as the text format so transcripts embed graphs verbatim.
impl Serialize for SignedGraph {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_text())
    }
}

impl<'de> Deserialize<'de> for SignedGraph {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        SignedGraph::parse(&text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_render() {
        let text = "# triangle\ngraph signed\nv 0\nv 1\nv 2\ne 0 1 +\ne 1 2 +\ne 0 2 -  # closing edge\n";
        let g: SignedGraph = text.parse().unwrap();
        assert_eq!(g.order(), 3);
        assert_eq!(g.sign(2, 0), Some(Sign::Neg));
        assert_eq!(SignedGraph::parse(&g.to_text()).unwrap(), g);
    }

    #[test]
    fn rejects_structural_violations() {
        let loop_ = "graph signed\nv 0\ne 0 0 +\n";
        assert!(matches!(
            SignedGraph::parse(loop_),
            Err(ParseError::Invalid {
                source: GraphError::SelfLoop(0),
                ..
            })
        ));
        let dup = "graph signed\nv 0\nv 1\ne 0 1 +\ne 1 0 -\n";
        assert!(matches!(
            SignedGraph::parse(dup),
            Err(ParseError::Invalid {
                source: GraphError::DuplicateEdge(0, 1),
                ..
            })
        ));
        let unknown = "graph signed\nv 0\ne 0 7 +\n";
        assert!(matches!(
            SignedGraph::parse(unknown),
            Err(ParseError::Invalid {
                source: GraphError::UnknownVertex(7),
                ..
            })
        ));
    }

    #[test]
    fn rejects_syntax() {
        assert!(matches!(SignedGraph::parse("v 0\n"), Err(ParseError::Syntax { .. })));
        assert!(matches!(
            SignedGraph::parse("graph signed\nv x\n"),
            Err(ParseError::Syntax { line: 2, .. })
        ));
        assert!(matches!(
            SignedGraph::parse("graph signed\nv 0\nv 1\ne 0 1 *\n"),
            Err(ParseError::Syntax { line: 4, .. })
        ));
    }

    #[test]
    fn components_and_trees() {
        let g = SignedGraph::on_range(5, [(0, 1, Sign::Pos), (3, 4, Sign::Neg)]).unwrap();
        assert_eq!(g.components(), vec![vec![0, 1], vec![2], vec![3, 4]]);
        assert!(SignedGraph::path(4).is_tree());
        assert!(!SignedGraph::cycle(4, 1).is_tree());
    }
}
