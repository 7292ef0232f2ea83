//! Brute-force enumerators and independent re-implementations used to
//! cross-check the rest of the crate at small sizes.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::ControlFlow;
use std::str::FromStr;
use std::sync::Mutex;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::Adjacency;
use crate::certificates::all_cycles_positive;
use crate::enumerate::{
    all_graphs, connected_graphs, labelled_signed_graphs, signings_up_to_isomorphism, switching_classes,
};
use crate::graph::{SignedGraph, VertexId};
use crate::linalg::{definiteness_of, gram_matrix, DefinitenessReport, IntMatrix, Verdict};
use crate::par::Exec;
use crate::reducer::{expected_det, recognize_ade, reduce_to_ade, ReduceError, ReduceMode, ReductionResult};
use crate::topology::plane::{planar_rotations, trace_faces, Face, PlaneGraph};
use crate::topology::{checkerboard_embedding, validate_checkerboard};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error("{what} is {value}, above the supported bound {bound}")]
    BoundExceeded { what: String, value: usize, bound: usize },
    #[error("matrix is not square")]
    NotSquare,
    #[error("integer overflow in cofactor expansion")]
    Overflow,
}

fn bound(what: &str, value: usize, bound: usize) -> Result<(), OracleError> {
    if value > bound {
        return Err(OracleError::BoundExceeded {
            what: what.into(),
            value,
            bound,
        });
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modulo {
    /// Labelled graphs on `0..n`.
    None,
    Isomorphism,
    /// Isomorphism and switching.
    Switching,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Signing {
    All,
    /// Signings in which every cycle is positive: its number of negative
    /// edges and its length differ in parity. Two such cycles never share
    /// more than one edge, so only graphs whose blocks are edges or cycles
    /// qualify.
    PositiveCyclesOnly,
    /// All edges positive.
    Unsigned,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EnumerationSpec {
    pub max_vertices: usize,
    pub connected: bool,
    pub modulo: Modulo,
    pub signing: Signing,
}

/// Vertex bound for labelled enumeration.
pub const MAX_LABELLED: usize = 5;
/// Vertex bound for signed enumeration up to isomorphism and switching.
pub const MAX_SIGNED: usize = 8;
/// Vertex bound for enumerating every signing up to isomorphism only.
pub const MAX_SIGNED_ISOMORPHISM: usize = 7;
/// Vertex bounds for unsigned enumeration (connected, all).
pub const MAX_UNSIGNED: (usize, usize) = (10, 9);

/// Every cycle has negative-edge count and length of different parity.
fn cycles_positive(g: &SignedGraph) -> bool {
    all_cycles_positive(g).map(|v| v.is_positive()).unwrap_or(false)
}

/// Exhaustive, duplicate-free enumeration in a deterministic order: by
/// vertex count, then canonical code of the underlying graph, then signing.
pub fn enumerate_graphs(spec: &EnumerationSpec, exec: Exec) -> Result<Vec<SignedGraph>, OracleError> {
    let n_max = spec.max_vertices;
    match (spec.modulo, spec.signing) {
        (Modulo::None, _) => bound("labelled vertex count", n_max, MAX_LABELLED)?,
        (_, Signing::Unsigned) if spec.connected => bound("vertex count", n_max, MAX_UNSIGNED.0)?,
        (_, Signing::Unsigned) => bound("vertex count", n_max, MAX_UNSIGNED.1)?,
        (Modulo::Isomorphism, Signing::All) => bound("vertex count", n_max, MAX_SIGNED_ISOMORPHISM)?,
        _ => bound("vertex count", n_max, MAX_SIGNED)?,
    }
    let mut out = Vec::new();
    for n in 1..=n_max {
        if spec.modulo == Modulo::None {
            let all = labelled_signed_graphs(n, spec.connected);
            out.extend(all.into_iter().filter(|g| match spec.signing {
                Signing::All => true,
                Signing::PositiveCyclesOnly => cycles_positive(g),
                Signing::Unsigned => g.negative_edges() == 0,
            }));
            continue;
        }
        let graphs = if spec.connected {
            connected_graphs(n, exec)
        } else {
            all_graphs(n, exec)
        };
        let (modulo, signing) = (spec.modulo, spec.signing);
        out.extend(exec.flat_map(graphs, move |adj| {
            match (modulo, signing) {
                (_, Signing::Unsigned) => vec![adj.to_signed()],
                (Modulo::Switching, Signing::All) => switching_classes(&adj),
                (Modulo::Isomorphism, Signing::All) => signings_up_to_isomorphism(&adj),
                (Modulo::Switching, Signing::PositiveCyclesOnly) => {
                    switching_classes(&adj).into_iter().filter(cycles_positive).collect()
                }
                (Modulo::Isomorphism, Signing::PositiveCyclesOnly) => signings_up_to_isomorphism(&adj)
                    .into_iter()
                    .filter(cycles_positive)
                    .collect(),
                (Modulo::None, _) => unreachable!(),
            }
        }));
    }
    Ok(out)
}

/// Every principal minor of `m` by Laplace expansion, indexed by the
/// bitmask of the retained indices.
///
/// For a fixed index set the expansion runs down its rows, so only minors
/// on a suffix of the rows and an arbitrary column subset are needed.
pub fn principal_minors(m: &IntMatrix) -> Result<Vec<i128>, OracleError> {
    if !m.is_square() {
        return Err(OracleError::NotSquare);
    }
    let n = m.rows();
    bound("matrix dimension", n, 10)?;
    let mut out = vec![0i128; 1 << n];
    out[0] = 1;
    let mut memo = vec![0i128; 1 << n];
    for set in 1u32..1 << n {
        let idx: Vec<usize> = (0..n).filter(|&i| set >> i & 1 == 1).collect();
        let k = idx.len();
        memo[0] = 1;
        for cols in 1u32..1 << k {
            let r = cols.count_ones() as usize;
            let row = idx[k - r];
            let mut acc = 0i128;
            let mut sign = 1i128;
            for (j, &col) in idx.iter().enumerate() {
                if cols >> j & 1 == 0 {
                    continue;
                }
                let a = m.get(row, col) as i128;
                if a != 0 {
                    let term = a
                        .checked_mul(memo[(cols & !(1 << j)) as usize])
                        .ok_or(OracleError::Overflow)?;
                    acc = acc.checked_add(sign * term).ok_or(OracleError::Overflow)?;
                }
                sign = -sign;
            }
            memo[cols as usize] = acc;
        }
        out[set as usize] = memo[(1 << k) - 1];
    }
    Ok(out)
}

/// Definiteness from the signs of all principal minors. The report carries
/// the leading minors but no witness vector.
pub fn brute_force_definiteness(m: &IntMatrix) -> Result<DefinitenessReport, OracleError> {
    let minors = principal_minors(m)?;
    let n = m.rows();
    let verdict = if minors[1..].iter().all(|&d| d > 0) {
        Verdict::PositiveDefinite
    } else if minors.iter().all(|&d| d >= 0) {
        Verdict::PositiveSemidefinite
    } else {
        Verdict::Indefinite
    };
    Ok(DefinitenessReport {
        verdict,
        witness: None,
        leading_minors: (1..=n).map(|k| BigInt::from(minors[(1 << k) - 1])).collect(),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Suite {
    Definiteness,
    Equivalence,
    Lemma33,
    Degree6,
    Coherence,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Definiteness,
        Suite::Equivalence,
        Suite::Lemma33,
        Suite::Degree6,
        Suite::Coherence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Definiteness => "definiteness",
            Suite::Equivalence => "equivalence",
            Suite::Lemma33 => "lemma33",
            Suite::Degree6 => "degree6",
            Suite::Coherence => "coherence",
        }
    }

    pub fn default_max_n(self) -> usize {
        match self {
            Suite::Definiteness | Suite::Lemma33 | Suite::Degree6 => 7,
            Suite::Equivalence | Suite::Coherence => 6,
        }
    }

    pub fn max_n_bound(self) -> usize {
        match self {
            Suite::Definiteness => 8,
            Suite::Equivalence | Suite::Lemma33 | Suite::Degree6 | Suite::Coherence => 7,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("unknown suite `{0}`")]
pub struct UnknownSuite(pub String);

impl FromStr for Suite {
    type Err = UnknownSuite;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| UnknownSuite(s.to_string()))
    }
}

/// Outcome of an oracle suite. Counts and failures are order-independent
/// of the execution policy.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub suite: Suite,
    pub max_n: usize,
    pub checked: usize,
    pub counts: BTreeMap<String, usize>,
    pub failures: Vec<String>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Per-item findings merged into a report.
#[derive(Default)]
struct Tally {
    counts: BTreeMap<String, usize>,
    failures: Vec<String>,
}

impl Tally {
    fn count(&mut self, key: impl Into<String>) {
        *self.counts.entry(key.into()).or_default() += 1;
    }

    fn fail(&mut self, msg: String) {
        self.failures.push(msg);
    }

    fn merge(mut self, other: Tally) -> Tally {
        for (k, v) in other.counts {
            *self.counts.entry(k).or_default() += v;
        }
        self.failures.extend(other.failures);
        self
    }

    fn into_report(self, suite: Suite, max_n: usize, checked: usize) -> SuiteReport {
        SuiteReport {
            suite,
            max_n,
            checked,
            counts: self.counts,
            failures: self.failures,
        }
    }
}

pub fn run_suite(suite: Suite, max_n: usize, exec: Exec) -> Result<SuiteReport, OracleError> {
    bound(&format!("max_n for suite {suite}"), max_n, suite.max_n_bound())?;
    match suite {
        Suite::Definiteness => definiteness_suite(max_n, exec),
        Suite::Equivalence => exhaustive_equivalence_check(max_n, exec),
        Suite::Lemma33 | Suite::Degree6 => checkerboard_degree_suite(suite, max_n, exec),
        Suite::Coherence => coherence_suite(max_n, exec),
    }
}

fn signed_classes(max_n: usize, exec: Exec) -> Result<Vec<SignedGraph>, OracleError> {
    enumerate_graphs(
        &EnumerationSpec {
            max_vertices: max_n,
            connected: true,
            modulo: Modulo::Switching,
            signing: Signing::All,
        },
        exec,
    )
}

fn definiteness_suite(max_n: usize, exec: Exec) -> Result<SuiteReport, OracleError> {
    let graphs = signed_classes(max_n, exec)?;
    let checked = graphs.len();
    let tallies = exec.map(graphs, |g| {
        let mut t = Tally::default();
        let m = gram_matrix(&g);
        let core = definiteness_of(m.matrix());
        match brute_force_definiteness(m.matrix()) {
            Ok(brute) => {
                t.count(format!("{:?}", brute.verdict));
                if brute.verdict != core.verdict || brute.leading_minors != core.leading_minors {
                    t.fail(format!(
                        "{g:?}: brute force {:?}, kernel {:?}",
                        brute.verdict, core.verdict
                    ));
                }
                if BigInt::from(principal_minors(m.matrix()).unwrap().last().copied().unwrap()) != m.det() {
                    t.fail(format!("{g:?}: determinants disagree"));
                }
            }
            Err(e) => t.fail(format!("{g:?}: {e}")),
        }
        t
    });
    let tally = tallies.into_iter().fold(Tally::default(), Tally::merge);
    Ok(tally.into_report(Suite::Definiteness, max_n, checked))
}

/// Memoized checkerboard embeddability of unsigned graphs.
#[derive(Default)]
struct EmbeddingCache(Mutex<HashMap<(usize, u128), bool>>);

impl EmbeddingCache {
    fn embeddable(&self, g: &SignedGraph) -> bool {
        let adj = Adjacency::from_signed(&g.underlying());
        let (code, _) = crate::canon::canonical_form(&adj);
        let key = (adj.n(), code);
        if let Some(&b) = self.0.lock().unwrap().get(&key) {
            return b;
        }
        let b = checkerboard_embedding(&g.underlying()).is_some();
        self.0.lock().unwrap().insert(key, b);
        b
    }
}

/// For every connected signed graph up to isomorphism and switching:
/// t-mode reduction succeeds exactly on positive graphs, certificates
/// verify and `(n, det)` matches the type; t'-mode agrees on the type, or
/// proves no t'-sequence exists on a graph without a checkerboard embedding.
pub fn exhaustive_equivalence_check(max_n: usize, exec: Exec) -> Result<SuiteReport, OracleError> {
    bound(
        "max_n for the equivalence check",
        max_n,
        Suite::Equivalence.max_n_bound(),
    )?;
    let graphs = signed_classes(max_n, exec)?;
    let checked = graphs.len();
    let cache = EmbeddingCache::default();
    let tallies = exec.map(graphs, |g| {
        let mut t = Tally::default();
        let positive = definiteness_of(gram_matrix(&g).matrix()).is_positive_definite();
        let mut t_type = None;
        match reduce_to_ade(&g, ReduceMode::T) {
            Ok(ReductionResult::Ade(r)) => {
                t.count(r.ade.to_string());
                t_type = Some(r.ade);
                if !positive {
                    t.fail(format!("{g:?}: reduced a non-positive graph"));
                }
                if !r.transcript.verify(&r.certificate).unwrap_or(false) {
                    t.fail(format!("{g:?}: certificate does not verify"));
                }
                if recognize_ade(&r.transcript.end).map(|m| m.ade) != Some(r.ade) || r.transcript.end != r.ade.diagram()
                {
                    t.fail(format!("{g:?}: end graph is not the {} diagram", r.ade));
                }
                if r.ade.rank != g.order() || gram_matrix(&g).det() != BigInt::from(expected_det(r.ade)) {
                    t.fail(format!("{g:?}: (n, det) does not match {}", r.ade));
                }
            }
            Ok(ReductionResult::NonPositive(_)) => {
                t.count("non_positive");
                if positive {
                    t.fail(format!("{g:?}: positive graph reported non-positive"));
                }
            }
            Err(e) => t.fail(format!("{g:?}: t mode: {e}")),
        }
        match reduce_to_ade(&g, ReduceMode::TPrime) {
            Ok(ReductionResult::Ade(r)) => {
                if Some(r.ade) != t_type {
                    t.fail(format!("{g:?}: modes disagree ({} vs {t_type:?})", r.ade));
                }
                if !r.transcript.verify(&r.certificate).unwrap_or(false) {
                    t.fail(format!("{g:?}: t' certificate does not verify"));
                }
            }
            Ok(ReductionResult::NonPositive(_)) => {
                if positive {
                    t.fail(format!("{g:?}: t' mode reported a positive graph non-positive"));
                }
            }
            Err(ReduceError::Unreachable { .. }) if !cache.embeddable(&g) => {
                t.count("tprime_unreachable_not_checkerboard");
            }
            Err(e) => t.fail(format!("{g:?}: t' mode: {e}")),
        }
        t
    });
    let tally = tallies.into_iter().fold(Tally::default(), Tally::merge);
    Ok(tally.into_report(Suite::Equivalence, max_n, checked))
}

/// Positive connected signed graphs whose underlying graph has a
/// checkerboard embedding, up to isomorphism and switching.
pub fn positive_checkerboard_graphs(max_n: usize, exec: Exec) -> Vec<SignedGraph> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        out.extend(exec.flat_map(connected_graphs(n, exec), |adj| {
            if checkerboard_embedding(&adj.to_signed()).is_none() {
                return Vec::new();
            }
            switching_classes(&adj)
                .into_iter()
                .filter(|g| definiteness_of(gram_matrix(g).matrix()).is_positive_definite())
                .collect()
        }));
    }
    out
}

fn checkerboard_degree_suite(suite: Suite, max_n: usize, exec: Exec) -> Result<SuiteReport, OracleError> {
    let graphs = positive_checkerboard_graphs(max_n, exec);
    let mut tally = Tally::default();
    for g in &graphs {
        let degrees: Vec<usize> = g.vertices().iter().map(|&v| g.degree(v)).collect();
        let max = g.max_degree();
        match suite {
            Suite::Lemma33 => {
                if g.order() < 3 {
                    tally.count("below_three_vertices");
                } else if degrees.iter().any(|&d| d == 2 || d == 3) {
                    tally.count("has_degree_2_or_3");
                } else {
                    tally.fail(format!("{g:?}: no vertex of degree 2 or 3"));
                }
            }
            _ => {
                tally.count(format!("max_degree_{max}"));
                if max > 6 {
                    tally.fail(format!("{g:?}: vertex of degree {max}"));
                }
            }
        }
    }
    Ok(tally.into_report(suite, max_n, graphs.len()))
}

/// Independent face data for one embedding and unbounded face.
struct FaceMasks {
    /// Per bounded face: edge mask and the mask of edges it traverses from
    /// lower to higher endpoint.
    faces: Vec<(u32, u32)>,
    simple: bool,
}

fn face_masks(faces: &[Face], outer: usize, edge_index: &BTreeMap<(VertexId, VertexId), usize>) -> FaceMasks {
    let mut out = Vec::new();
    let mut simple = true;
    for (i, f) in faces.iter().enumerate() {
        if i == outer {
            continue;
        }
        simple &= f.is_simple_cycle();
        let mut mask = 0u32;
        let mut up = 0u32;
        for &(a, b) in &f.darts {
            let e = edge_index[&(a.min(b), a.max(b))];
            mask |= 1 << e;
            if a < b {
                up |= 1 << e;
            }
        }
        out.push((mask, up));
    }
    FaceMasks { faces: out, simple }
}

/// Brute force over orientations: bit `e` set means edge `e` points from
/// its lower to its higher endpoint.
fn coherently_orientable(fm: &FaceMasks, m: usize) -> Option<u32> {
    if !fm.simple {
        return None;
    }
    (0..1u32 << m).find(|&o| {
        fm.faces
            .iter()
            .all(|&(mask, up)| o & mask == up || o & mask == (!up & mask))
    })
}

/// Brute force over colourings of the bounded faces.
fn dual_bipartite(fm: &FaceMasks) -> bool {
    let k = fm.faces.len();
    (0..1u32 << k)
        .any(|c| (0..k).all(|i| (i + 1..k).all(|j| fm.faces[i].0 & fm.faces[j].0 == 0 || (c >> i & 1) != (c >> j & 1))))
}

/// Over every plane embedding and choice of unbounded face of connected
/// graphs on at most `max_n` vertices: an orientation making every bounded
/// face a directed cycle exists exactly when the bounded faces are simple
/// cycles with a bipartite dual, and the validator agrees with both.
fn coherence_suite(max_n: usize, exec: Exec) -> Result<SuiteReport, OracleError> {
    let mut graphs = Vec::new();
    for n in 1..=max_n {
        graphs.extend(connected_graphs(n, exec));
    }
    let tallies = exec.map(graphs, |adj| {
        let mut t = Tally::default();
        let g = adj.to_signed();
        let ids: Vec<VertexId> = g.vertices().to_vec();
        let edges: Vec<(VertexId, VertexId)> = g.edges().map(|(u, v, _)| (u, v)).collect();
        let edge_index: BTreeMap<(VertexId, VertexId), usize> =
            edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
        let nbrs: Vec<Vec<usize>> = (0..adj.n())
            .map(|v| (0..adj.n()).filter(|&w| adj.has(v, w)).collect())
            .collect();
        let articulated = (0..adj.n()).any(|v| adj.n() > 2 && !adj.without(v).is_connected());
        if adj.n() == 1 {
            t.count("plane_graphs");
            return t;
        }
        planar_rotations(&nbrs, |rot| {
            let rotation: BTreeMap<VertexId, Vec<VertexId>> = rot
                .iter()
                .enumerate()
                .map(|(v, r)| (ids[v], r.iter().map(|&w| ids[w]).collect()))
                .collect();
            let faces = trace_faces(&rotation);
            for outer in 0..faces.len() {
                t.count("plane_graphs");
                let fm = face_masks(&faces, outer, &edge_index);
                let a = coherently_orientable(&fm, edges.len());
                let b = fm.simple && dual_bipartite(&fm);
                if a.is_some() != b {
                    t.fail(format!(
                        "{g:?} rotation {rot:?} outer {outer}: orientable {} vs bipartite {b}",
                        a.is_some()
                    ));
                }
                if let Some(o) = a {
                    t.count("checkerboard");
                    if articulated {
                        t.count("checkerboard_with_cut_vertex");
                    }
                    let arcs = edges
                        .iter()
                        .enumerate()
                        .map(|(e, &(u, v))| if o >> e & 1 == 1 { (u, v) } else { (v, u) });
                    let p = PlaneGraph::new(g.clone(), arcs, rotation.clone(), vec![faces[outer].darts[0]])
                        .expect("enumerated embedding is planar");
                    if !validate_checkerboard(&p).valid {
                        t.fail(format!("{g:?}: validator rejects a coherent orientation"));
                    }
                } else {
                    let arcs = edges.iter().copied();
                    let p = PlaneGraph::new(g.clone(), arcs, rotation.clone(), vec![faces[outer].darts[0]])
                        .expect("enumerated embedding is planar");
                    if validate_checkerboard(&p).valid {
                        t.fail(format!("{g:?}: validator accepts a non-orientable embedding"));
                    }
                }
            }
            ControlFlow::Continue(())
        });
        t
    });
    let tally = tallies.into_iter().fold(Tally::default(), Tally::merge);
    let checked = tally.counts.get("plane_graphs").copied().unwrap_or(0);
    Ok(tally.into_report(Suite::Coherence, max_n, checked))
}
