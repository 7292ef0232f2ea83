use std::fmt::Write;

use ade_core::{Sign, SignedGraph};

/// One undirected DOT graph; negative edges are dashed and every edge is
/// labelled with its sign.
pub fn graph(name: &str, g: &SignedGraph) -> String {
    let mut s = format!("graph {name} {{\n");
    for v in g.vertices() {
        writeln!(s, "  {v};").unwrap();
    }
    for (u, v, sign) in g.edges() {
        match sign {
            Sign::Pos => writeln!(s, "  {u} -- {v} [label=\"+\"];").unwrap(),
            Sign::Neg => writeln!(s, "  {u} -- {v} [label=\"\u{2212}\", style=dashed];").unwrap(),
        }
    }
    s.push_str("}\n");
    s
}

pub fn start_end(start: &SignedGraph, end: &SignedGraph) -> String {
    graph("start", start) + &graph("end", end)
}
