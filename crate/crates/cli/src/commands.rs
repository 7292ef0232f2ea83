use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use ade_core::certificates::mine_minimal_minors;
use ade_core::moves::TranscriptDocument;
use ade_core::oracle::{run_suite, Suite};
use ade_core::reducer::{reduce_with_limits, NonPositive, ReduceError, ReduceMode, Reduction, SearchLimits};
use ade_core::topology::{
    checkerboard_embedding, classify_link, link_reductions, parse_braid, reduce_checkerboard, validate_checkerboard,
    PlaneGraph,
};
use ade_core::{classify as classify_graph, DefinitenessReport, Exec, ReductionResult, SignedGraph};
use num_bigint::BigInt;
use serde::Serialize;
use serde_json::json;

use crate::error::{CliError, INVALID, NOT_POSITIVE, OK};
use crate::{dot, ModeArg, SuiteArg};

/// `println!` that ignores a closed stdout.
macro_rules! out {
    ($($t:tt)*) => {{
        use std::io::Write as _;
        let _ = writeln!(std::io::stdout(), $($t)*);
    }};
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_owned(),
        source,
    })
}

fn load_graph(path: &Path) -> Result<SignedGraph, CliError> {
    SignedGraph::parse(&read(path)?).map_err(|e| CliError::Parse(e.to_string()))
}

/// Plane-graph text, or plain graph text for which an embedding is found.
fn load_plane(path: &Path, allow_plain: bool) -> Result<PlaneGraph, CliError> {
    let text = read(path)?;
    let has_rotation = text.lines().any(|l| l.trim_start().starts_with("rot "));
    if allow_plain && !has_rotation {
        let g = SignedGraph::parse(&text).map_err(|e| CliError::Parse(e.to_string()))?;
        let p = checkerboard_embedding(&g)
            .ok_or_else(|| CliError::Invalid("graph has no checkerboard embedding".into()))?;
        return p.with_graph(g).map_err(|e| CliError::Invalid(e.to_string()));
    }
    PlaneGraph::parse(&text).map_err(|e| CliError::Parse(e.to_string()))
}

fn print_json<T: Serialize>(value: &T) {
    out!("{}", serde_json::to_string_pretty(value).expect("serializable"));
}

fn code(c: u8) -> ExitCode {
    ExitCode::from(c)
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn print_report(r: &DefinitenessReport) {
    out!("verdict: {:?}", r.verdict);
    if let Some(w) = &r.witness {
        out!("witness: ({})", join(w));
    }
}

pub fn classify(path: &Path, json: bool) -> Result<ExitCode, CliError> {
    let g = load_graph(path)?;
    let c = classify_graph(&g);
    if json {
        print_json(&c);
    } else {
        out!("vertices: {}", c.order);
        out!("determinant: {}", c.det);
        out!(
            "inertia: +{} 0:{} -{} (signature {})",
            c.inertia.n_plus,
            c.inertia.n_zero,
            c.inertia.n_minus,
            c.inertia.signature()
        );
        print_report(&c.definiteness);
        if let Some(cy) = &c.failing_cycle {
            out!(
                "non-positive cycle: {} ({} negative edges)",
                join(&cy.cycle),
                cy.negative_count
            );
        }
        if let Some(m) = &c.minor {
            let hosts: Vec<_> = m.host_vertices();
            out!("forbidden pattern: {} on vertices {}", m.pattern_name, join(&hosts));
        }
        if !c.ade.is_empty() {
            out!(
                "type: {}",
                c.ade.iter().map(ToString::to_string).collect::<Vec<_>>().join(" + ")
            );
        }
        if let Some(e) = &c.error {
            out!("note: {e}");
        }
    }
    Ok(code(if c.definiteness.is_positive_definite() {
        OK
    } else {
        NOT_POSITIVE
    }))
}

pub struct ReduceOptions {
    pub file: PathBuf,
    pub mode: ModeArg,
    pub emit_certificate: bool,
    pub dot: Option<PathBuf>,
    pub json: bool,
    pub node_limit: usize,
}

fn reduce_error(e: ReduceError) -> CliError {
    match e {
        ReduceError::Unreachable { .. } | ReduceError::SearchExhausted { .. } => CliError::Exhausted(e.to_string()),
        other => CliError::Invalid(other.to_string()),
    }
}

pub fn reduce(o: &ReduceOptions) -> Result<ExitCode, CliError> {
    let result = match o.mode {
        ModeArg::Checkerboard => {
            let p = load_plane(&o.file, true)?;
            reduce_checkerboard(&p, o.node_limit).map_err(reduce_error)?.result
        }
        ModeArg::T | ModeArg::Tprime => {
            let g = load_graph(&o.file)?;
            if !g.is_connected() {
                return Err(CliError::Invalid(
                    "graph is not connected; reduce each component separately".into(),
                ));
            }
            let mode = if o.mode == ModeArg::T {
                ReduceMode::T
            } else {
                ReduceMode::TPrime
            };
            let limits = SearchLimits {
                nodes: o.node_limit,
                ..SearchLimits::default()
            };
            reduce_with_limits(&g, mode, limits).map_err(reduce_error)?
        }
    };
    match &result {
        ReductionResult::Ade(r) => {
            if let Some(path) = &o.dot {
                write(path, &dot::start_end(&r.transcript.start, &r.transcript.end))?;
            }
            let verified = r.transcript.verify(&r.certificate).unwrap_or(false);
            if o.emit_certificate {
                print_json(&TranscriptDocument::new(&r.transcript, Some(r.certificate.clone())));
            } else if o.json {
                print_json(&result);
            } else {
                print_reduction(r, verified);
            }
            Ok(code(if verified { OK } else { INVALID }))
        }
        ReductionResult::NonPositive(np) => {
            if o.json {
                print_json(&result);
            } else {
                print_non_positive(np);
            }
            Ok(code(NOT_POSITIVE))
        }
    }
}

fn print_reduction(r: &Reduction, verified: bool) {
    out!("type: {}", r.ade);
    out!(
        "moves: {} ({} t-moves)",
        r.transcript.moves.len(),
        r.transcript.t_move_count()
    );
    out!("certificate: {}", if verified { "verified" } else { "FAILED" });
}

fn print_non_positive(np: &NonPositive) {
    out!("not positive");
    print_report(&np.report);
    if let Some(cy) = &np.cycle {
        out!("non-positive cycle: {}", join(&cy.cycle));
    }
    if let Some(m) = &np.minor {
        out!("forbidden pattern: {}", m.pattern_name);
    }
}

pub fn verify(path: &Path, json: bool) -> Result<ExitCode, CliError> {
    let text = read(path)?;
    let doc = match serde_json::from_str::<TranscriptDocument>(&text) {
        Ok(d) => d,
        Err(e) => match serde_json::from_str::<ReductionResult>(&text) {
            Ok(ReductionResult::Ade(r)) => TranscriptDocument::new(&r.transcript, Some(r.certificate.clone())),
            _ => return Err(CliError::Parse(e.to_string())),
        },
    };
    let cert = doc
        .certificate
        .clone()
        .ok_or_else(|| CliError::Invalid("transcript carries no certificate".into()))?;
    let t = doc.transcript();
    let consistent = t.is_consistent();
    let certified = t.verify(&cert).unwrap_or(false);
    if json {
        print_json(&json!({ "replays": consistent, "certificate_valid": certified, "moves": t.moves.len() }));
    } else {
        out!("replays: {}", if consistent { "yes" } else { "no" });
        out!("certificate: {}", if certified { "verified" } else { "FAILED" });
    }
    Ok(code(if consistent && certified { OK } else { INVALID }))
}

pub fn minors(max_n: usize, json: bool) -> Result<ExitCode, CliError> {
    let catalog = mine_minimal_minors(max_n, Exec::default());
    if json {
        let entries: Vec<_> = catalog
            .patterns
            .iter()
            .map(|p| {
                json!({
                    "name": p.name,
                    "aliases": p.aliases,
                    "vertices": p.graph.order(),
                    "det": p.det.to_string(),
                    "kernel": p.kernel.iter().map(BigInt::to_string).collect::<Vec<_>>(),
                    "graph": p.graph.to_text(),
                })
            })
            .collect();
        print_json(&entries);
        return Ok(code(OK));
    }
    out!("# name vertices det kernel");
    for p in &catalog.patterns {
        out!("# {} {} {} ({})", p.name, p.graph.order(), p.det, join(&p.kernel));
    }
    for p in &catalog.patterns {
        out!("");
        if p.aliases.is_empty() {
            out!("# {}", p.name);
        } else {
            out!("# {} ({})", p.name, p.aliases.join(", "));
        }
        out!("{}", p.graph.to_text().trim_end());
    }
    Ok(code(OK))
}

pub fn braid(word: &str, reduce: bool, json: bool) -> Result<ExitCode, CliError> {
    let b = parse_braid(word).map_err(|e| CliError::Parse(e.to_string()))?;
    let c = classify_link(&b).map_err(reduce_error)?;
    let reductions = if reduce && c.maximal_signature {
        link_reductions(&c.linking_graph).map_err(reduce_error)?
    } else {
        Vec::new()
    };
    if json {
        let mut value = serde_json::to_value(&c).expect("serializable");
        if reduce {
            value["reductions"] = serde_json::to_value(&reductions).expect("serializable");
        }
        print_json(&value);
    } else {
        out!("word: {}", c.word);
        out!("bricks: {}", c.bricks);
        out!("determinant: {}", c.det);
        out!(
            "signature: {} (inertia +{} 0:{} -{})",
            c.signature,
            c.inertia.n_plus,
            c.inertia.n_zero,
            c.inertia.n_minus
        );
        out!("maximal signature: {}", if c.maximal_signature { "yes" } else { "no" });
        if !c.ade.is_empty() {
            out!(
                "type: {}",
                c.ade.iter().map(ToString::to_string).collect::<Vec<_>>().join(" + ")
            );
        }
        for r in reductions.iter().filter_map(ReductionResult::ade) {
            let ok = r.transcript.verify(&r.certificate).unwrap_or(false);
            out!(
                "  {}: {} moves, certificate {}",
                r.ade,
                r.transcript.moves.len(),
                if ok { "verified" } else { "FAILED" }
            );
        }
        if let Some(r) = &c.not_maximal {
            print_report(r);
        }
    }
    Ok(code(if reduce && !c.maximal_signature {
        NOT_POSITIVE
    } else {
        OK
    }))
}

pub fn validate(path: &Path, json: bool) -> Result<ExitCode, CliError> {
    let p = load_plane(path, false)?;
    let report = validate_checkerboard(&p);
    if json {
        print_json(&report);
    } else if let Some(colors) = &report.coloring {
        out!("valid checkerboard graph");
        let faces = p.faces();
        for &(i, c) in colors {
            out!("face {i} [{}]: colour {c}", join(&faces[i].walk()));
        }
    } else {
        out!("not a checkerboard graph: {:?}", report.violation);
    }
    Ok(code(if report.valid { OK } else { INVALID }))
}

pub fn oracle(suite: SuiteArg, max_n: Option<usize>, json: bool) -> Result<ExitCode, CliError> {
    let suite = match suite {
        SuiteArg::Definiteness => Suite::Definiteness,
        SuiteArg::Equivalence => Suite::Equivalence,
        SuiteArg::Lemma33 => Suite::Lemma33,
        SuiteArg::Degree6 => Suite::Degree6,
        SuiteArg::Coherence => Suite::Coherence,
    };
    let max_n = max_n.unwrap_or(suite.default_max_n());
    let report = run_suite(suite, max_n, Exec::default()).map_err(|e| CliError::Usage(e.to_string()))?;
    if json {
        print_json(&report);
    } else {
        out!(
            "suite {suite} up to {max_n} vertices: {} checked, {}",
            report.checked,
            if report.passed() { "passed" } else { "FAILED" }
        );
        for (k, v) in &report.counts {
            out!("  {k}: {v}");
        }
        for f in report.failures.iter().take(20) {
            out!("  failure: {f}");
        }
    }
    Ok(code(if report.passed() { OK } else { INVALID }))
}
