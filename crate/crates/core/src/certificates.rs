//! Combinatorial witnesses of non-positivity: cycle parity and forbidden
//! induced trees, plus the miner that derives the minimal forbidden trees.

use std::ops::ControlFlow;
use std::sync::OnceLock;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::canon::Adjacency;
use crate::enumerate::trees;
use crate::graph::{Sign, SignedGraph, VertexId};
use crate::linalg::{definiteness, gram_matrix, is_positive, Verdict};
use crate::par::Exec;

/// Default vertex bound for cycle enumeration.
pub const DEFAULT_CYCLE_BOUND: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
#[error("graph has {order} vertices; cycle enumeration is limited to {bound}")]
pub struct CycleBoundExceeded {
    pub order: usize,
    pub bound: usize,
}

/// A simple cycle with its sign data. A cycle is positive when its length
/// and its number of negative edges have different parity.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CycleReport {
    pub cycle: Vec<VertexId>,
    pub length: usize,
    pub negative_count: usize,
    pub positive: bool,
    /// No chords: the cycle is an induced subgraph.
    pub induced: bool,
}

impl CycleReport {
    fn new(g: &SignedGraph, rows: &[u32], idx: &[usize]) -> Self {
        let ids = g.vertices();
        let cycle: Vec<VertexId> = idx.iter().map(|&i| ids[i]).collect();
        let n = cycle.len();
        let negative_count = (0..n)
            .filter(|&k| g.sign(cycle[k], cycle[(k + 1) % n]) == Some(Sign::Neg))
            .count();
        let mask: u32 = idx.iter().map(|&i| 1u32 << i).sum();
        let induced = idx.iter().all(|&i| (rows[i] & mask).count_ones() == 2);
        CycleReport {
            cycle,
            length: n,
            negative_count,
            positive: (n + negative_count) % 2 == 1,
            induced,
        }
    }
}

fn bit_rows(g: &SignedGraph) -> Vec<u32> {
    Adjacency::from_signed(g).rows().to_vec()
}

/// Visits each simple cycle once as a vertex index sequence starting at its
/// smallest index, with the second vertex smaller than the last.
fn for_each_cycle(rows: &[u32], mut f: impl FnMut(&[usize]) -> ControlFlow<()>) {
    fn dfs(
        rows: &[u32],
        start: usize,
        path: &mut Vec<usize>,
        used: u32,
        f: &mut impl FnMut(&[usize]) -> ControlFlow<()>,
    ) -> ControlFlow<()> {
        let v = *path.last().unwrap();
        let mut next = rows[v] & !used & !((1u32 << (start + 1)) - 1);
        while next != 0 {
            let w = next.trailing_zeros() as usize;
            next &= next - 1;
            path.push(w);
            if path.len() >= 3 && rows[w] >> start & 1 == 1 && path[1] < w {
                f(path)?;
            }
            dfs(rows, start, path, used | 1 << w, f)?;
            path.pop();
        }
        ControlFlow::Continue(())
    }
    for s in 0..rows.len() {
        let mut path = vec![s];
        if dfs(rows, s, &mut path, 1 << s, &mut f).is_break() {
            return;
        }
    }
}

pub fn enumerate_cycles(g: &SignedGraph) -> Result<Vec<CycleReport>, CycleBoundExceeded> {
    enumerate_cycles_bounded(g, DEFAULT_CYCLE_BOUND)
}

pub fn enumerate_cycles_bounded(g: &SignedGraph, bound: usize) -> Result<Vec<CycleReport>, CycleBoundExceeded> {
    let bound = bound.min(31);
    if g.order() > bound {
        return Err(CycleBoundExceeded {
            order: g.order(),
            bound,
        });
    }
    let rows = bit_rows(g);
    let mut out = Vec::new();
    for_each_cycle(&rows, |c| {
        out.push(CycleReport::new(g, &rows, c));
        ControlFlow::Continue(())
    });
    Ok(out)
}

/// Outcome of a cycle-positivity check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum CycleVerdict {
    AllPositive,
    Failing(CycleReport),
}

impl CycleVerdict {
    pub fn is_positive(&self) -> bool {
        matches!(self, CycleVerdict::AllPositive)
    }
}

fn first_failing(g: &SignedGraph, induced_only: bool) -> Result<CycleVerdict, CycleBoundExceeded> {
    if g.order() > DEFAULT_CYCLE_BOUND {
        return Err(CycleBoundExceeded {
            order: g.order(),
            bound: DEFAULT_CYCLE_BOUND,
        });
    }
    let rows = bit_rows(g);
    let mut found = None;
    for_each_cycle(&rows, |c| {
        let r = CycleReport::new(g, &rows, c);
        if !r.positive && (r.induced || !induced_only) {
            found = Some(r);
            return ControlFlow::Break(());
        }
        ControlFlow::Continue(())
    });
    Ok(found.map_or(CycleVerdict::AllPositive, CycleVerdict::Failing))
}

/// Whether every simple cycle of `g` is positive.
pub fn all_cycles_positive(g: &SignedGraph) -> Result<CycleVerdict, CycleBoundExceeded> {
    first_failing(g, false)
}

/// Whether every chordless cycle is positive. A failing chordless cycle is
/// an induced subgraph with singular Gram form, so it certifies that `g` is
/// not positive; a failing cycle with chords certifies nothing.
pub fn all_induced_cycles_positive(g: &SignedGraph) -> Result<CycleVerdict, CycleBoundExceeded> {
    first_failing(g, true)
}

/// An unsigned forbidden pattern with its kernel witness.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorPattern {
    pub name: String,
    pub aliases: Vec<String>,
    pub graph: SignedGraph,
    #[serde(with = "crate::linalg::bigint_serde")]
    pub det: BigInt,
    #[serde(with = "crate::linalg::bigint_vec")]
    pub kernel: Vec<BigInt>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorCatalog {
    pub patterns: Vec<MinorPattern>,
}

impl MinorCatalog {
    pub fn get(&self, name: &str) -> Option<&MinorPattern> {
        self.patterns
            .iter()
            .find(|p| p.name == name || p.aliases.iter().any(|a| a == name))
    }

    pub fn len(&self) -> usize {
        self.patterns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.patterns.is_empty()
    }
}

/// An induced copy of a catalog pattern inside a host graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinorCertificate {
    pub pattern_name: String,
    /// `(pattern vertex, host vertex)` pairs.
    pub embedding: Vec<(VertexId, VertexId)>,
}

impl MinorCertificate {
    pub fn host_vertices(&self) -> Vec<VertexId> {
        self.embedding.iter().map(|&(_, h)| h).collect()
    }

    /// Checks that the embedding is injective and induces the pattern shape.
    pub fn holds(&self, host: &SignedGraph, catalog: &MinorCatalog) -> bool {
        let Some(p) = catalog.get(&self.pattern_name) else {
            return false;
        };
        let hosts = self.host_vertices();
        let mut sorted = hosts.clone();
        sorted.sort_unstable();
        sorted.dedup();
        if sorted.len() != hosts.len() || hosts.len() != p.graph.order() || !hosts.iter().all(|&h| host.contains(h)) {
            return false;
        }
        self.embedding.iter().all(|&(a, ha)| {
            self.embedding
                .iter()
                .all(|&(b, hb)| a == b || p.graph.has_edge(a, b) == host.has_edge(ha, hb))
        })
    }
}

fn induced_embedding(pattern: &SignedGraph, host: &SignedGraph) -> Option<Vec<(VertexId, VertexId)>> {
    let k = pattern.order();
    let n = host.order();
    if k > n {
        return None;
    }
    // Pattern vertices in BFS order so each one after the first has an
    // already placed neighbour.
    let mut order: Vec<usize> = Vec::with_capacity(k);
    let pids = pattern.vertices();
    for start in 0..k {
        if order.contains(&start) {
            continue;
        }
        order.push(start);
        let mut head = order.len() - 1;
        while head < order.len() {
            let v = pids[order[head]];
            for w in pattern.neighbors(v) {
                let wi = pattern.index_of(w).unwrap();
                if !order.contains(&wi) {
                    order.push(wi);
                }
            }
            head += 1;
        }
    }
    let p_adj: Vec<Vec<bool>> = (0..k)
        .map(|i| (0..k).map(|j| pattern.has_edge(pids[i], pids[j])).collect())
        .collect();
    let hids = host.vertices();
    let h_adj: Vec<Vec<bool>> = (0..n)
        .map(|i| (0..n).map(|j| host.has_edge(hids[i], hids[j])).collect())
        .collect();
    let p_deg: Vec<usize> = (0..k).map(|i| pattern.degree(pids[i])).collect();
    let h_deg: Vec<usize> = (0..n).map(|i| host.degree(hids[i])).collect();

    #[allow(clippy::too_many_arguments)]
    fn extend(
        pos: usize,
        order: &[usize],
        map: &mut [usize],
        used: &mut [bool],
        p_adj: &[Vec<bool>],
        h_adj: &[Vec<bool>],
        p_deg: &[usize],
        h_deg: &[usize],
    ) -> bool {
        if pos == order.len() {
            return true;
        }
        let pv = order[pos];
        let anchor = order[..pos].iter().copied().find(|&q| p_adj[pv][q]);
        for h in 0..h_adj.len() {
            if used[h] || h_deg[h] < p_deg[pv] {
                continue;
            }
            if let Some(a) = anchor {
                if !h_adj[map[a]][h] {
                    continue;
                }
            }
            if order[..pos].iter().any(|&q| p_adj[pv][q] != h_adj[map[q]][h]) {
                continue;
            }
            map[pv] = h;
            used[h] = true;
            if extend(pos + 1, order, map, used, p_adj, h_adj, p_deg, h_deg) {
                return true;
            }
            used[h] = false;
        }
        false
    }

    let mut map = vec![usize::MAX; k];
    let mut used = vec![false; n];
    if extend(0, &order, &mut map, &mut used, &p_adj, &h_adj, &p_deg, &h_deg) {
        Some((0..k).map(|i| (pids[i], hids[map[i]])).collect())
    } else {
        None
    }
}

/// First catalog pattern (in catalog order) occurring as an induced
/// subgraph of the underlying graph of `g`.
pub fn find_forbidden_minor(g: &SignedGraph, catalog: &MinorCatalog) -> Option<MinorCertificate> {
    catalog.patterns.iter().find_map(|p| {
        induced_embedding(&p.graph, g).map(|embedding| MinorCertificate {
            pattern_name: p.name.clone(),
            embedding,
        })
    })
}

/// Branch vertices and arm lengths of a tree with at most one vertex of
/// degree above 2.
fn arms(t: &SignedGraph) -> Option<Vec<usize>> {
    let hubs: Vec<VertexId> = t.vertices().iter().copied().filter(|&v| t.degree(v) > 2).collect();
    let [hub] = hubs[..] else { return None };
    let mut lens: Vec<usize> = t
        .neighbors(hub)
        .into_iter()
        .map(|mut v| {
            let mut prev = hub;
            let mut len = 1;
            while t.degree(v) == 2 {
                let next = t.neighbors(v).into_iter().find(|&w| w != prev).unwrap();
                prev = v;
                v = next;
                len += 1;
            }
            len
        })
        .collect();
    lens.sort_unstable();
    Some(lens)
}

/// Affine Dynkin name of a minimal non-positive tree, with the letter
/// aliases used for forbidden subgraphs.
fn pattern_names(t: &SignedGraph) -> (String, Vec<String>) {
    let n = t.order();
    let branch = t.vertices().iter().filter(|&&v| t.degree(v) > 2).count();
    match arms(t).as_deref() {
        Some([1, 1, 1, 1]) => ("D~4".into(), vec!["X".into()]),
        Some([2, 2, 2]) => ("E~6".into(), vec!["Y".into()]),
        Some([1, 3, 3]) => ("E~7".into(), vec!["T".into()]),
        Some([1, 2, 5]) => ("E~8".into(), vec!["E".into()]),
        _ if branch == 2 => (format!("D~{}", n - 1), vec!["D~".into()]),
        _ => (format!("tree{n}"), Vec::new()),
    }
}

fn make_pattern(t: SignedGraph) -> MinorPattern {
    let m = gram_matrix(&t);
    let report = definiteness(&m);
    assert_eq!(
        report.verdict,
        Verdict::PositiveSemidefinite,
        "minimal non-positive trees are affine"
    );
    let (name, aliases) = pattern_names(&t);
    MinorPattern {
        name,
        aliases,
        det: m.det(),
        kernel: report.witness.expect("semidefinite report carries a kernel vector"),
        graph: t,
    }
}

/// Trees on at most `max_n` vertices that are not positive while every
/// proper subtree is. Since positivity is inherited by induced subgraphs it
/// suffices to test the subtrees obtained by deleting one leaf.
pub fn mine_minimal_minors(max_n: usize, exec: Exec) -> MinorCatalog {
    assert!(max_n <= 10, "mining is limited to 10 vertices");
    let candidates: Vec<Adjacency> = (1..=max_n).flat_map(trees).collect();
    let found: Vec<Option<MinorPattern>> = exec.map(candidates, |adj| {
        let t = adj.to_signed();
        if is_positive(&t) {
            return None;
        }
        let leaves = t.vertices().iter().copied().filter(|&v| t.degree(v) == 1);
        let minimal = leaves.into_iter().all(|leaf| {
            let keep: Vec<VertexId> = t.vertices().iter().copied().filter(|&v| v != leaf).collect();
            is_positive(&t.induced(&keep))
        });
        minimal.then(|| make_pattern(t))
    });
    let mut patterns: Vec<MinorPattern> = found.into_iter().flatten().collect();
    patterns.sort_by(|a, b| (a.graph.order(), &a.name).cmp(&(b.graph.order(), &b.name)));
    MinorCatalog { patterns }
}

/// The catalog mined at 9 vertices, computed once.
pub fn default_catalog() -> &'static MinorCatalog {
    static CATALOG: OnceLock<MinorCatalog> = OnceLock::new();
    CATALOG.get_or_init(|| mine_minimal_minors(9, Exec::Serial))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Sign::*;
    use crate::linalg::is_positive;

    fn theta() -> SignedGraph {
        // Positive 4-cycles 0-1-2-3 and 0-1-2-4 sharing the path 0-1-2.
        SignedGraph::on_range(
            5,
            [
                (0, 1, Pos),
                (1, 2, Pos),
                (2, 3, Neg),
                (3, 0, Pos),
                (2, 4, Neg),
                (4, 0, Pos),
            ],
        )
        .unwrap()
    }

    #[test]
    fn tree_has_no_cycles() {
        assert!(enumerate_cycles(&SignedGraph::star(4)).unwrap().is_empty());
        assert!(all_cycles_positive(&SignedGraph::path(7)).unwrap().is_positive());
    }

    #[test]
    fn triangle_cycle_report() {
        let c = enumerate_cycles(&SignedGraph::cycle(3, 0)).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!((c[0].length, c[0].negative_count, c[0].positive), (3, 0, true));
    }

    #[test]
    fn theta_outer_cycle_is_not_positive() {
        let g = theta();
        let cycles = enumerate_cycles(&g).unwrap();
        assert_eq!(cycles.len(), 3);
        let outer = cycles
            .iter()
            .find(|c| c.cycle.contains(&3) && c.cycle.contains(&4))
            .unwrap();
        assert!(!outer.positive);
        assert!(outer.induced);
        assert_eq!(cycles.iter().filter(|c| c.positive).count(), 2);
        assert!(!is_positive(&g));
    }

    #[test]
    fn parity_examples() {
        assert!(all_cycles_positive(&SignedGraph::cycle(5, 2)).unwrap().is_positive());
        match all_cycles_positive(&SignedGraph::cycle(4, 0)).unwrap() {
            CycleVerdict::Failing(r) => assert_eq!((r.length, r.negative_count), (4, 0)),
            v => panic!("{v:?}"),
        }
    }

    #[test]
    fn parity_matches_determinant() {
        for n in 3..=10 {
            for x in 0..=n {
                let g = SignedGraph::cycle(n, x);
                let det = gram_matrix(&g).det();
                let pos = all_cycles_positive(&g).unwrap().is_positive();
                assert_eq!(pos, det == BigInt::from(4), "n={n} x={x}");
                assert_eq!(!pos, det == BigInt::from(0), "n={n} x={x}");
            }
        }
    }

    #[test]
    fn k4_has_noninduced_failures_only() {
        let k4 = SignedGraph::on_range(4, (0..4).flat_map(|i| (i + 1..4).map(move |j| (i, j, Pos)))).unwrap();
        assert!(is_positive(&k4));
        assert!(!all_cycles_positive(&k4).unwrap().is_positive());
        assert!(all_induced_cycles_positive(&k4).unwrap().is_positive());
    }

    #[test]
    fn cycle_bound() {
        assert!(enumerate_cycles(&SignedGraph::path(13)).is_err());
    }

    #[test]
    fn mined_catalog_small() {
        let c5 = mine_minimal_minors(5, Exec::Serial);
        assert_eq!(c5.len(), 1);
        let star = &c5.patterns[0];
        assert_eq!(star.name, "D~4");
        assert_eq!(star.det, BigInt::from(0));
        let mut sorted: Vec<i64> = star.kernel.iter().map(|x| i64::try_from(x).unwrap().abs()).collect();
        sorted.sort_unstable();
        assert_eq!(sorted, [1, 1, 1, 1, 2]);
        assert!(gram_matrix(&star.graph)
            .matrix()
            .apply(&star.kernel)
            .iter()
            .all(|x| *x == BigInt::from(0)));
        let c7 = mine_minimal_minors(7, Exec::Serial);
        let names: Vec<&str> = c7.patterns.iter().map(|p| p.name.as_str()).collect();
        assert_eq!(names, ["D~4", "D~5", "D~6", "E~6"]);
    }

    #[test]
    fn path_has_no_minor() {
        assert!(find_forbidden_minor(&SignedGraph::path(12), default_catalog()).is_none());
    }

    #[test]
    fn star_host_maps_hub_to_hub() {
        let star = SignedGraph::star(4);
        let cert = find_forbidden_minor(&star, default_catalog()).unwrap();
        assert_eq!(cert.pattern_name, "D~4");
        assert!(cert.holds(&star, default_catalog()));
        let pattern = default_catalog().get("X").unwrap();
        let hub = pattern
            .graph
            .vertices()
            .iter()
            .copied()
            .find(|&v| pattern.graph.degree(v) == 4)
            .unwrap();
        let image = cert.embedding.iter().find(|&&(p, _)| p == hub).unwrap().1;
        assert_eq!(image, 0);
    }

    #[test]
    fn high_degree_vertex_on_path() {
        // Path 0..9 plus a vertex 10 joined to seven consecutive path vertices.
        let mut g = SignedGraph::path(10);
        g = SignedGraph::with_edges(0..11, g.edges()).unwrap();
        for v in 1..8 {
            g.add_edge(10, v, Pos).unwrap();
        }
        let cert = find_forbidden_minor(&g, default_catalog()).unwrap();
        assert!(cert.holds(&g, default_catalog()));
        assert!(cert.host_vertices().contains(&10));
    }

    #[test]
    fn certificates_survive_switching() {
        let star = SignedGraph::star(4);
        let s = crate::switching::switch(&star, 0).unwrap();
        let cert = find_forbidden_minor(&star, default_catalog()).unwrap();
        assert!(cert.holds(&s, default_catalog()));
    }
}
