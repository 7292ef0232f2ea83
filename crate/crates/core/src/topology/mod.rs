//! Positive braids, Seifert forms and checkerboard plane graphs.

pub mod braid;
pub mod checkerboard;
pub mod plane;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

pub use braid::{bricks, linking_graph, parse_braid, signature, BraidError, BraidWord, Brick, SeifertForm};
pub use checkerboard::{
    checkerboard_move, checkerboard_moves, reduce_checkerboard, CheckerboardError, CheckerboardReduction,
};
pub use plane::{
    checkerboard_embedding, validate_checkerboard, CheckerboardReport, Face, PlaneError, PlaneGraph, Violation,
};

use crate::graph::SignedGraph;
use crate::linalg::{definiteness_of, inertia_of, DefinitenessReport, Inertia};
use crate::reducer::{reduce_forest, AdeType, ReduceError, ReduceMode, ReductionResult};

/// Invariants of a positive braid closure read off its Seifert form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinkClassification {
    pub word: String,
    pub bricks: usize,
    pub linking_graph: SignedGraph,
    pub form: SeifertForm,
    #[serde(with = "crate::linalg::bigint_serde")]
    pub det: BigInt,
    pub signature: i64,
    pub inertia: Inertia,
    /// Signature equals the rank of the form.
    pub maximal_signature: bool,
    /// One ADE type per component of the linking graph, when maximal.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ade: Vec<AdeType>,
    /// Definiteness witness when the signature is not maximal.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub not_maximal: Option<DefinitenessReport>,
}

pub fn classify_link(b: &BraidWord) -> Result<LinkClassification, ReduceError> {
    let (g, form) = linking_graph(b);
    let m = form.symmetrized();
    let inertia = inertia_of(&m);
    let report = definiteness_of(&m);
    let maximal = report.is_positive_definite();
    let ade = if maximal {
        link_reductions(&g)?
            .iter()
            .map(|r| r.ade().expect("components of a positive graph are positive").ade)
            .collect()
    } else {
        Vec::new()
    };
    Ok(LinkClassification {
        word: b.to_string(),
        bricks: g.order(),
        det: m.det(),
        signature: inertia.signature(),
        inertia,
        maximal_signature: maximal,
        ade,
        not_maximal: (!maximal).then_some(report),
        linking_graph: g,
        form,
    })
}

/// Per-component reductions of a linking graph (empty for no bricks).
pub fn link_reductions(g: &SignedGraph) -> Result<Vec<ReductionResult>, ReduceError> {
    if g.order() == 0 {
        return Ok(Vec::new());
    }
    reduce_forest(g, ReduceMode::T)
}
