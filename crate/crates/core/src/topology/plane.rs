//! Oriented plane graphs given by rotation systems, face tracing and the
//! checkerboard condition.
//!
//! The face to the left of dart `u -> v` continues with `v -> w`, where `w`
//! follows `u` in the cyclic rotation at `v`.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::ops::ControlFlow;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::graph::{parse_graph_line, parse_id, ParseError, SignedGraph, VertexId};

pub type Dart = (VertexId, VertexId);

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlaneError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("edge {0}-{1} has no direction")]
    MissingDirection(VertexId, VertexId),
    #[error("direction {0}->{1} is not an edge")]
    BadDirection(VertexId, VertexId),
    #[error("rotation at {0} does not list exactly its neighbours")]
    RotationMismatch(VertexId),
    #[error("component of {vertex}: V - E + F = {v} - {e} + {f} != 2")]
    EulerViolation {
        vertex: VertexId,
        v: usize,
        e: usize,
        f: usize,
    },
    #[error("outer face annotation: {0}")]
    BadOuter(String),
}

/// A face as its boundary walk of darts.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Face {
    pub darts: Vec<Dart>,
}

impl Face {
    /// Vertices in walk order (with repetitions if the walk revisits).
    pub fn walk(&self) -> Vec<VertexId> {
        self.darts.iter().map(|d| d.0).collect()
    }

    pub fn contains_dart(&self, d: Dart) -> bool {
        self.darts.contains(&d)
    }

    /// Simple closed walk of length at least 3.
    pub fn is_simple_cycle(&self) -> bool {
        let w = self.walk();
        let set: BTreeSet<VertexId> = w.iter().copied().collect();
        w.len() >= 3 && set.len() == w.len()
    }
}

/// A signed graph with an edge orientation, a rotation system and one
/// dart on the unbounded face of every component that has edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlaneGraph {
    graph: SignedGraph,
    /// `(tail, head)` keyed by the sorted endpoint pair.
    arcs: BTreeMap<(VertexId, VertexId), Dart>,
    rotation: BTreeMap<VertexId, Vec<VertexId>>,
    outer: Vec<Dart>,
}

fn key(u: VertexId, v: VertexId) -> (VertexId, VertexId) {
    (u.min(v), u.max(v))
}

/// Traces all faces of a rotation system, in order of their smallest dart.
pub(crate) fn trace_faces(rotation: &BTreeMap<VertexId, Vec<VertexId>>) -> Vec<Face> {
    let succ = |v: VertexId, u: VertexId| {
        let r = &rotation[&v];
        let i = r.iter().position(|&w| w == u).expect("rotation lists neighbour");
        r[(i + 1) % r.len()]
    };
    let mut seen = BTreeSet::new();
    let mut faces = Vec::new();
    for (&u, r) in rotation {
        for &v in r {
            if seen.contains(&(u, v)) {
                continue;
            }
            let mut darts = Vec::new();
            let mut d = (u, v);
            while seen.insert(d) {
                darts.push(d);
                d = (d.1, succ(d.1, d.0));
            }
            faces.push(Face { darts });
        }
    }
    faces
}

impl PlaneGraph {
    pub fn new(
        graph: SignedGraph,
        arcs: impl IntoIterator<Item = Dart>,
        rotation: BTreeMap<VertexId, Vec<VertexId>>,
        outer: Vec<Dart>,
    ) -> Result<Self, PlaneError> {
        let mut arc_map = BTreeMap::new();
        for (t, h) in arcs {
            if !graph.has_edge(t, h) {
                return Err(PlaneError::BadDirection(t, h));
            }
            arc_map.insert(key(t, h), (t, h));
        }
        if let Some((u, v, _)) = graph.edges().find(|&(u, v, _)| !arc_map.contains_key(&(u, v))) {
            return Err(PlaneError::MissingDirection(u, v));
        }
        let mut rot = BTreeMap::new();
        for &v in graph.vertices() {
            let r = rotation.get(&v).cloned().unwrap_or_default();
            let mut sorted = r.clone();
            sorted.sort_unstable();
            if sorted != graph.neighbors(v) {
                return Err(PlaneError::RotationMismatch(v));
            }
            rot.insert(v, r);
        }
        if let Some(&v) = rotation.keys().find(|v| !graph.contains(**v)) {
            return Err(PlaneError::RotationMismatch(v));
        }
        let p = PlaneGraph {
            graph,
            arcs: arc_map,
            rotation: rot,
            outer,
        };
        p.check_euler()?;
        p.check_outer()?;
        Ok(p)
    }

    fn check_euler(&self) -> Result<(), PlaneError> {
        let faces = trace_faces(&self.rotation);
        for comp in self.graph.components() {
            let set: BTreeSet<VertexId> = comp.iter().copied().collect();
            let e = self.graph.edges().filter(|(u, _, _)| set.contains(u)).count();
            if e == 0 {
                continue;
            }
            let f = faces.iter().filter(|f| set.contains(&f.darts[0].0)).count();
            if comp.len() + f != e + 2 {
                return Err(PlaneError::EulerViolation {
                    vertex: comp[0],
                    v: comp.len(),
                    e,
                    f,
                });
            }
        }
        Ok(())
    }

    fn check_outer(&self) -> Result<(), PlaneError> {
        for &(u, v) in &self.outer {
            if !self.graph.has_edge(u, v) {
                return Err(PlaneError::BadOuter(format!("{u}->{v} is not a dart")));
            }
        }
        for comp in self.graph.components() {
            if comp.len() < 2 {
                continue;
            }
            let count = self.outer.iter().filter(|d| comp.contains(&d.0)).count();
            if count != 1 {
                return Err(PlaneError::BadOuter(format!(
                    "component of {} has {count} outer faces, expected 1",
                    comp[0]
                )));
            }
        }
        Ok(())
    }

    pub fn graph(&self) -> &SignedGraph {
        &self.graph
    }

    pub fn arcs(&self) -> impl Iterator<Item = Dart> + '_ {
        self.arcs.values().copied()
    }

    /// `(tail, head)` of edge `{u, v}`.
    pub fn arc(&self, u: VertexId, v: VertexId) -> Option<Dart> {
        self.arcs.get(&key(u, v)).copied()
    }

    pub fn rotation(&self, v: VertexId) -> &[VertexId] {
        &self.rotation[&v]
    }

    pub fn rotations(&self) -> &BTreeMap<VertexId, Vec<VertexId>> {
        &self.rotation
    }

    pub fn outer_darts(&self) -> &[Dart] {
        &self.outer
    }

    pub fn faces(&self) -> Vec<Face> {
        trace_faces(&self.rotation)
    }

    /// Indices into [`faces`](Self::faces) of the unbounded faces.
    pub fn outer_faces(&self) -> Vec<usize> {
        let faces = self.faces();
        self.outer
            .iter()
            .map(|&d| {
                faces
                    .iter()
                    .position(|f| f.contains_dart(d))
                    .expect("outer dart lies on a face")
            })
            .collect()
    }

    /// Same embedding with a new signed payload on the same underlying graph.
    pub fn with_graph(&self, graph: SignedGraph) -> Result<Self, PlaneError> {
        PlaneGraph::new(graph, self.arcs(), self.rotation.clone(), self.outer.clone())
    }

    /// Renders the plane-graph text format.
    pub fn to_text(&self) -> String {
        let mut s = self.graph.to_text();
        for (t, h) in self.arcs() {
            s.push_str(&format!("dir {t} {h}\n"));
        }
        for (v, r) in &self.rotation {
            let list: Vec<String> = r.iter().map(|w| w.to_string()).collect();
            s.push_str(&format!("rot {v}: {}\n", list.join(" ")));
        }
        let faces = self.faces();
        for d in &self.outer {
            let idx = faces.iter().position(|f| f.contains_dart(*d)).unwrap();
            s.push_str(&format!("outer {idx}\n"));
        }
        s
    }

    /// Parses the graph text format extended by `dir <u> <v>`,
    /// `rot <v>: <neighbours in cyclic order>` and `outer <face-index>` (or
    /// `outer <u> <v>` naming a dart of the unbounded face). Components
    /// without cycles need no `outer` line.
    pub fn parse(text: &str) -> Result<Self, PlaneError> {
        let mut g = SignedGraph::default();
        let mut header = false;
        let mut arcs = Vec::new();
        let mut rotation = BTreeMap::new();
        enum Outer {
            Index(usize, usize),
            Dart(Dart),
        }
        let mut outer = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let toks: Vec<&str> = content.split_whitespace().collect();
            if !header {
                if toks != ["graph", "signed"] && toks != ["graph", "plane"] {
                    return Err(ParseError::syntax(line, "expected header `graph signed`").into());
                }
                header = true;
                continue;
            }
            if parse_graph_line(&mut g, &toks, line)? {
                continue;
            }
            match toks[0] {
                "dir" if toks.len() == 3 => arcs.push((parse_id(toks[1], line)?, parse_id(toks[2], line)?)),
                "rot" if toks.len() >= 2 && toks[1].ends_with(':') => {
                    let v = parse_id(toks[1].trim_end_matches(':'), line)?;
                    let list = toks[2..]
                        .iter()
                        .map(|t| parse_id(t, line))
                        .collect::<Result<Vec<_>, _>>()?;
                    if rotation.insert(v, list).is_some() {
                        return Err(ParseError::syntax(line, format!("second rotation for {v}")).into());
                    }
                }
                "outer" if toks.len() == 2 => {
                    let idx = toks[1]
                        .parse()
                        .map_err(|_| ParseError::syntax(line, "expected `outer <face-index>`"))?;
                    outer.push(Outer::Index(idx, line));
                }
                "outer" if toks.len() == 3 => {
                    outer.push(Outer::Dart((parse_id(toks[1], line)?, parse_id(toks[2], line)?)));
                }
                _ => {
                    return Err(
                        ParseError::syntax(line, format!("unknown or malformed directive `{}`", toks[0])).into(),
                    )
                }
            }
        }
        if !header {
            return Err(ParseError::syntax(1, "missing header `graph signed`").into());
        }
        for &v in g.vertices() {
            rotation.entry(v).or_insert_with(Vec::new);
        }
        let faces = {
            // Validate rotations before tracing.
            for (&v, r) in &rotation {
                let mut sorted = r.clone();
                sorted.sort_unstable();
                if !g.contains(v) || sorted != g.neighbors(v) {
                    return Err(PlaneError::RotationMismatch(v));
                }
            }
            trace_faces(&rotation)
        };
        let mut darts = Vec::new();
        for o in outer {
            match o {
                Outer::Dart(d) => darts.push(d),
                Outer::Index(i, line) => {
                    let f = faces
                        .get(i)
                        .ok_or_else(|| PlaneError::BadOuter(format!("line {line}: no face {i}")))?;
                    darts.push(f.darts[0]);
                }
            }
        }
        // Acyclic components have a single face, which is unbounded.
        for comp in g.components() {
            let set: BTreeSet<VertexId> = comp.iter().copied().collect();
            let e = g.edges().filter(|(u, _, _)| set.contains(u)).count();
            if e > 0 && e + 1 == comp.len() && !darts.iter().any(|d| set.contains(&d.0)) {
                let f = faces.iter().find(|f| set.contains(&f.darts[0].0)).unwrap();
                darts.push(f.darts[0]);
            }
        }
        PlaneGraph::new(g, arcs, rotation, darts)
    }

    /// Bounded faces with indices into [`faces`](Self::faces).
    pub fn bounded_faces(&self) -> Vec<(usize, Face)> {
        let outer = self.outer_faces();
        self.faces()
            .into_iter()
            .enumerate()
            .filter(|(i, _)| !outer.contains(i))
            .collect()
    }
}

impl Serialize for PlaneGraph {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_text())
    }
}

impl<'de> Deserialize<'de> for PlaneGraph {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        PlaneGraph::parse(&String::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

/// Why a plane graph is not a checkerboard graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// A bounded face whose boundary is not a directed simple cycle.
    NotDirected { face: usize, walk: Vec<VertexId> },
    /// An odd cycle of bounded faces, consecutive ones sharing an edge.
    OddDualCycle { faces: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckerboardReport {
    pub valid: bool,
    /// `(face index, colour)` for every bounded face when valid. Colour 0
    /// faces run along their arcs, colour 1 faces against them.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coloring: Option<Vec<(usize, u8)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
}

/// Direction of a face walk relative to the arcs: `Some(0)` when every dart
/// is an arc, `Some(1)` when every dart is reversed.
fn face_direction(p: &PlaneGraph, f: &Face) -> Option<u8> {
    let along: Vec<bool> = f.darts.iter().map(|&(u, v)| p.arc(u, v) == Some((u, v))).collect();
    if along.iter().all(|&a| a) {
        Some(0)
    } else if along.iter().all(|&a| !a) {
        Some(1)
    } else {
        None
    }
}

/// Two-colours the graph whose vertices are `nodes` and whose edges join
/// faces sharing an edge; returns an odd cycle on failure.
pub(crate) fn two_colour(faces: &[(usize, Face)]) -> Result<BTreeMap<usize, u8>, Vec<usize>> {
    let mut by_edge: BTreeMap<(VertexId, VertexId), Vec<usize>> = BTreeMap::new();
    for (i, f) in faces {
        for &(u, v) in &f.darts {
            by_edge.entry(key(u, v)).or_default().push(*i);
        }
    }
    let mut nbrs: BTreeMap<usize, BTreeSet<usize>> = faces.iter().map(|(i, _)| (*i, BTreeSet::new())).collect();
    for fs in by_edge.values() {
        if let [a, b] = fs[..] {
            if a != b {
                nbrs.get_mut(&a).unwrap().insert(b);
                nbrs.get_mut(&b).unwrap().insert(a);
            }
        }
    }
    let mut colour: BTreeMap<usize, u8> = BTreeMap::new();
    let mut parent: BTreeMap<usize, usize> = BTreeMap::new();
    for &(root, _) in faces {
        if colour.contains_key(&root) {
            continue;
        }
        colour.insert(root, 0);
        let mut queue = VecDeque::from([root]);
        while let Some(a) = queue.pop_front() {
            for &b in &nbrs[&a] {
                match colour.get(&b) {
                    None => {
                        colour.insert(b, 1 - colour[&a]);
                        parent.insert(b, a);
                        queue.push_back(b);
                    }
                    Some(&c) if c == colour[&a] => {
                        // Join the two tree paths at their lowest common ancestor.
                        let path_to_root = |mut x: usize| {
                            let mut p = vec![x];
                            while let Some(&y) = parent.get(&x) {
                                p.push(y);
                                x = y;
                            }
                            p
                        };
                        let pa = path_to_root(a);
                        let pb = path_to_root(b);
                        let lca = *pa.iter().find(|x| pb.contains(x)).unwrap();
                        let mut cycle: Vec<usize> = pa.iter().copied().take_while(|&x| x != lca).collect();
                        cycle.push(lca);
                        let back: Vec<usize> = pb.iter().copied().take_while(|&x| x != lca).collect();
                        cycle.extend(back.into_iter().rev());
                        return Err(cycle);
                    }
                    Some(_) => {}
                }
            }
        }
    }
    Ok(colour)
}

/// Checks that every bounded face is a directed cycle and that the bounded
/// faces can be two-coloured with faces sharing an edge coloured apart.
pub fn validate_checkerboard(p: &PlaneGraph) -> CheckerboardReport {
    let bounded = p.bounded_faces();
    let invalid = |v: Violation| CheckerboardReport {
        valid: false,
        coloring: None,
        violation: Some(v),
    };
    // The dual condition depends only on the embedding, so it is checked
    // before the orientation.
    if let Err(faces) = two_colour(&bounded) {
        return invalid(Violation::OddDualCycle { faces });
    }
    for (i, f) in &bounded {
        if !f.is_simple_cycle() || face_direction(p, f).is_none() {
            return invalid(Violation::NotDirected {
                face: *i,
                walk: f.walk(),
            });
        }
    }
    CheckerboardReport {
        valid: true,
        coloring: Some(
            bounded
                .iter()
                .map(|(i, f)| (*i, face_direction(p, f).unwrap()))
                .collect(),
        ),
        violation: None,
    }
}

/// Positional rotation systems: `rot[v]` lists neighbour indices cyclically.
type Rot = Vec<Vec<usize>>;

fn positional_faces(rot: &Rot) -> Vec<Vec<(usize, usize)>> {
    let succ = |v: usize, u: usize| {
        let r = &rot[v];
        let i = r.iter().position(|&w| w == u).unwrap();
        r[(i + 1) % r.len()]
    };
    let mut seen = BTreeSet::new();
    let mut faces = Vec::new();
    for (u, around) in rot.iter().enumerate() {
        for &v in around {
            if seen.contains(&(u, v)) {
                continue;
            }
            let mut f = Vec::new();
            let mut d = (u, v);
            while seen.insert(d) {
                f.push(d);
                d = (d.1, succ(d.1, d.0));
            }
            faces.push(f);
        }
    }
    faces
}

/// Every cyclic order of `items` with `items[0]` first.
fn cyclic_orders(items: &[usize]) -> Vec<Vec<usize>> {
    if items.len() <= 2 {
        return vec![items.to_vec()];
    }
    let mut out = Vec::new();
    let mut rest = items[1..].to_vec();
    fn permute(k: usize, rest: &mut Vec<usize>, first: usize, out: &mut Vec<Vec<usize>>) {
        if k == rest.len() {
            let mut v = vec![first];
            v.extend_from_slice(rest);
            out.push(v);
            return;
        }
        for i in k..rest.len() {
            rest.swap(k, i);
            permute(k + 1, rest, first, out);
            rest.swap(k, i);
        }
    }
    permute(0, &mut rest, items[0], &mut out);
    out
}

/// Visits every genus-0 rotation system of the connected graph `nbrs`
/// exactly once. A DFS spanning tree is embedded in every possible way and
/// the remaining edges are added one at a time, each splitting a face that
/// contains both endpoints at a chosen pair of corners.
pub(crate) fn planar_rotations(nbrs: &[Vec<usize>], mut f: impl FnMut(&Rot) -> ControlFlow<()>) {
    let n = nbrs.len();
    if n == 0 {
        return;
    }
    let mut tree: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut seen = vec![false; n];
    let mut stack = vec![0usize];
    seen[0] = true;
    let mut in_tree = BTreeSet::new();
    // Iterative DFS keeping the tree path-like.
    let mut next_child = vec![0usize; n];
    while let Some(&v) = stack.last() {
        if next_child[v] < nbrs[v].len() {
            let w = nbrs[v][next_child[v]];
            next_child[v] += 1;
            if !seen[w] {
                seen[w] = true;
                tree[v].push(w);
                tree[w].push(v);
                in_tree.insert((v.min(w), v.max(w)));
                stack.push(w);
            }
        } else {
            stack.pop();
        }
    }
    let extra: Vec<(usize, usize)> = (0..n)
        .flat_map(|u| nbrs[u].iter().filter(move |&&v| u < v).map(move |&v| (u, v)))
        .filter(|e| !in_tree.contains(e))
        .collect();
    let choices: Vec<Vec<Vec<usize>>> = tree.iter().map(|t| cyclic_orders(t)).collect();

    fn add_edges(
        rot: &mut Rot,
        extra: &[(usize, usize)],
        f: &mut impl FnMut(&Rot) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let Some(&(u, v)) = extra.first() else {
            return f(rot);
        };
        for face in positional_faces(rot) {
            // Corner at a_i: incoming dart (a_{i-1} -> a_i); insert after a_{i-1}.
            let corners = |x: usize| -> Vec<usize> { face.iter().filter(|d| d.1 == x).map(|d| d.0).collect() };
            let (cu, cv) = (corners(u), corners(v));
            for &pu in &cu {
                for &pv in &cv {
                    let saved = (rot[u].clone(), rot[v].clone());
                    let iu = rot[u].iter().position(|&w| w == pu).unwrap();
                    rot[u].insert(iu + 1, v);
                    let iv = rot[v].iter().position(|&w| w == pv).unwrap();
                    rot[v].insert(iv + 1, u);
                    let r = add_edges(rot, &extra[1..], f);
                    rot[u] = saved.0;
                    rot[v] = saved.1;
                    r?;
                }
            }
        }
        ControlFlow::Continue(())
    }

    fn assign(
        k: usize,
        rot: &mut Rot,
        choices: &[Vec<Vec<usize>>],
        extra: &[(usize, usize)],
        f: &mut impl FnMut(&Rot) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        if k == choices.len() {
            return add_edges(rot, extra, f);
        }
        for c in &choices[k] {
            rot[k] = c.clone();
            assign(k + 1, rot, choices, extra, f)?;
        }
        ControlFlow::Continue(())
    }

    let mut rot: Rot = vec![Vec::new(); n];
    let _ = assign(0, &mut rot, &choices, &extra, &mut f);
}

/// A checkerboard embedding of the connected graph `g`, if one exists:
/// some plane embedding and choice of unbounded face in which every
/// bounded face is a simple cycle and bounded faces sharing an edge can be
/// coloured apart. Arcs then follow each face's colour.
type Embedding = (Vec<Dart>, BTreeMap<VertexId, Vec<VertexId>>, Dart);

fn embed_component(g: &SignedGraph) -> Option<Embedding> {
    let ids = g.vertices();
    let n = ids.len();
    let nbrs: Vec<Vec<usize>> = ids
        .iter()
        .map(|&v| g.neighbors(v).into_iter().map(|w| g.index_of(w).unwrap()).collect())
        .collect();
    let mut found = None;
    planar_rotations(&nbrs, |rot| {
        let faces = positional_faces(rot);
        for outer in 0..faces.len() {
            let bounded: Vec<(usize, Face)> = faces
                .iter()
                .enumerate()
                .filter(|(i, _)| *i != outer)
                .map(|(i, f)| {
                    (
                        i,
                        Face {
                            darts: f.iter().map(|&(a, b)| (ids[a], ids[b])).collect(),
                        },
                    )
                })
                .collect();
            if !bounded.iter().all(|(_, f)| f.is_simple_cycle()) {
                continue;
            }
            let Ok(colour) = two_colour(&bounded) else { continue };
            let mut arcs: BTreeMap<(VertexId, VertexId), Dart> = BTreeMap::new();
            for (i, f) in &bounded {
                for &(a, b) in &f.darts {
                    let d = if colour[i] == 0 { (a, b) } else { (b, a) };
                    arcs.insert(key(a, b), d);
                }
            }
            for (u, v, _) in g.edges() {
                arcs.entry((u, v)).or_insert((u, v));
            }
            let rotation = (0..n)
                .map(|v| (ids[v], rot[v].iter().map(|&w| ids[w]).collect()))
                .collect();
            let d = faces[outer][0];
            found = Some((arcs.into_values().collect(), rotation, (ids[d.0], ids[d.1])));
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    found
}

/// Searches for a checkerboard embedding of `g` (signs are carried along).
/// Exhaustive over plane embeddings; intended for small graphs.
pub fn checkerboard_embedding(g: &SignedGraph) -> Option<PlaneGraph> {
    let mut arcs = Vec::new();
    let mut rotation = BTreeMap::new();
    let mut outer = Vec::new();
    for comp in g.components() {
        let sub = g.induced(&comp);
        if sub.size() == 0 {
            rotation.insert(comp[0], Vec::new());
            continue;
        }
        let (a, r, o) = embed_component(&sub)?;
        arcs.extend(a);
        rotation.extend(r);
        outer.push(o);
    }
    Some(PlaneGraph::new(g.clone(), arcs, rotation, outer).expect("search yields a valid plane graph"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Sign::*;

    const TRIANGLE: &str = "graph signed\nv 0\nv 1\nv 2\ne 0 1 +\ne 1 2 +\ne 0 2 +\n\
        dir 0 1\ndir 1 2\ndir 2 0\nrot 0: 1 2\nrot 1: 2 0\nrot 2: 0 1\nouter 1\n";

    fn triangle() -> PlaneGraph {
        PlaneGraph::parse(TRIANGLE).unwrap()
    }

    #[test]
    fn triangle_faces() {
        let p = triangle();
        assert_eq!(p.faces().len(), 2);
        assert_eq!(p.bounded_faces().len(), 1);
        let r = validate_checkerboard(&p);
        assert!(r.valid, "{r:?}");
        assert_eq!(r.coloring.unwrap().len(), 1);
        assert_eq!(PlaneGraph::parse(&p.to_text()).unwrap(), p);
    }

    /// Two triangles 0-1-2 and 0-2-3 sharing edge 0-2, drawn with 1 and 3
    /// on opposite sides.
    fn diamond(dir02: Dart, dirs: [Dart; 4]) -> PlaneGraph {
        let g = SignedGraph::on_range(4, [(0, 1, Pos), (1, 2, Pos), (0, 2, Pos), (2, 3, Pos), (0, 3, Pos)]).unwrap();
        let rotation = BTreeMap::from([(0, vec![1, 2, 3]), (1, vec![2, 0]), (2, vec![3, 0, 1]), (3, vec![0, 2])]);
        let faces = trace_faces(&rotation);
        let outer = faces.iter().find(|f| f.darts.len() == 4).unwrap().darts[0];
        let mut arcs = vec![dir02];
        arcs.extend(dirs);
        PlaneGraph::new(g, arcs, rotation, vec![outer]).unwrap()
    }

    #[test]
    fn two_triangles_sharing_an_edge() {
        let faces = trace_faces(&BTreeMap::from([
            (0, vec![1, 2, 3]),
            (1, vec![2, 0]),
            (2, vec![3, 0, 1]),
            (3, vec![0, 2]),
        ]));
        assert_eq!(faces.len(), 3);
        let inner: Vec<&Face> = faces.iter().filter(|f| f.darts.len() == 3).collect();
        // Orient each inner face along its own walk.
        let mut dirs = Vec::new();
        for f in &inner {
            for &d in &f.darts {
                if d.0.min(d.1) == 0 && d.0.max(d.1) == 2 {
                    continue;
                }
                dirs.push(d);
            }
        }
        let shared = inner[0]
            .darts
            .iter()
            .copied()
            .find(|d| key(d.0, d.1) == (0, 2))
            .unwrap();
        let p = diamond(shared, dirs.try_into().unwrap());
        let r = validate_checkerboard(&p);
        assert!(!r.valid, "both faces along their walks cannot share an arc");
        // Reverse the second face: now coherent.
        let mut dirs2: Vec<Dart> = inner[0]
            .darts
            .iter()
            .copied()
            .filter(|d| key(d.0, d.1) != (0, 2))
            .collect();
        dirs2.extend(
            inner[1]
                .darts
                .iter()
                .filter(|d| key(d.0, d.1) != (0, 2))
                .map(|&(a, b)| (b, a)),
        );
        let p = diamond(shared, dirs2.try_into().unwrap());
        let r = validate_checkerboard(&p);
        assert!(r.valid, "{r:?}");
        let colours: BTreeSet<u8> = r.coloring.unwrap().into_iter().map(|c| c.1).collect();
        assert_eq!(colours, BTreeSet::from([0, 1]));
    }

    #[test]
    fn k4_has_four_faces() {
        let rotation = BTreeMap::from([
            (0, vec![1, 2, 3]),
            (1, vec![0, 3, 2]),
            (2, vec![0, 1, 3]),
            (3, vec![0, 2, 1]),
        ]);
        assert_eq!(trace_faces(&rotation).len(), 4);
    }

    #[test]
    fn euler_violation_detected() {
        // K4 with a non-planar rotation system.
        let g = SignedGraph::on_range(4, (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j, Pos)))).unwrap();
        let rotation = BTreeMap::from([
            (0, vec![1, 2, 3]),
            (1, vec![0, 2, 3]),
            (2, vec![0, 1, 3]),
            (3, vec![0, 1, 2]),
        ]);
        let arcs: Vec<Dart> = g.edges().map(|(u, v, _)| (u, v)).collect();
        let e = PlaneGraph::new(g, arcs, rotation, vec![(0, 1)]).unwrap_err();
        assert!(matches!(e, PlaneError::EulerViolation { .. }), "{e:?}");
    }

    #[test]
    fn parse_errors() {
        assert!(matches!(
            PlaneGraph::parse(&TRIANGLE.replace("rot 0: 1 2", "rot 0: 1")),
            Err(PlaneError::RotationMismatch(0))
        ));
        assert!(matches!(
            PlaneGraph::parse(&TRIANGLE.replace("dir 2 0\n", "")),
            Err(PlaneError::MissingDirection(0, 2))
        ));
        assert!(PlaneGraph::parse(&TRIANGLE.replace("outer 1\n", "")).is_err());
        assert!(PlaneGraph::parse(&TRIANGLE.replace("outer 1", "bogus 1")).is_err());
    }

    #[test]
    fn tree_needs_no_outer_line() {
        let p = PlaneGraph::parse("graph signed\nv 0\nv 1\ne 0 1 -\ndir 0 1\nrot 0: 1\nrot 1: 0\n").unwrap();
        assert!(validate_checkerboard(&p).valid);
    }

    #[test]
    fn planar_rotation_counts() {
        // Each rotation system of a tree is planar: K_{1,3} has 2.
        let star = vec![vec![1, 2, 3], vec![0], vec![0], vec![0]];
        let mut count = 0;
        planar_rotations(&star, |_| {
            count += 1;
            ControlFlow::Continue(())
        });
        assert_eq!(count, 2);
        // K4 has exactly two planar rotation systems (mirror images).
        let k4: Vec<Vec<usize>> = (0..4).map(|i| (0..4).filter(|&j| j != i).collect()).collect();
        let mut seen = BTreeSet::new();
        planar_rotations(&k4, |r| {
            let faces = positional_faces(r);
            assert_eq!(faces.len(), 4);
            seen.insert(r.clone());
            ControlFlow::Continue(())
        });
        assert_eq!(seen.len(), 2);
    }

    #[test]
    fn embeddability() {
        let tri = SignedGraph::cycle(3, 0);
        let p = checkerboard_embedding(&tri).unwrap();
        assert!(validate_checkerboard(&p).valid);
        // K4: every embedding has three bounded triangles pairwise adjacent.
        let k4 = SignedGraph::on_range(4, (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j, Pos)))).unwrap();
        assert!(checkerboard_embedding(&k4).is_none());
        // K5 is not planar.
        let k5 = SignedGraph::on_range(5, (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j, Pos)))).unwrap();
        assert!(checkerboard_embedding(&k5).is_none());
        let c4 = SignedGraph::cycle(4, 1);
        assert!(checkerboard_embedding(&c4).is_some());
        let two = SignedGraph::with_edges(0..5, [(0, 1, Pos), (2, 3, Pos), (3, 4, Pos), (2, 4, Pos)]).unwrap();
        let p = checkerboard_embedding(&two).unwrap();
        assert_eq!(p.outer_darts().len(), 2);
        assert!(validate_checkerboard(&p).valid);
    }
}
