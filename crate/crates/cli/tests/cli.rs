use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ade_core::moves::TranscriptDocument;
use ade_core::topology::checkerboard_embedding;
use ade_core::{Sign, SignedGraph};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn ade(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ade"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn triangle_reduces_with_a_verified_certificate() {
    let tri = fixture("triangle.sg");
    let out = ade(&[
        "reduce",
        tri.to_str().unwrap(),
        "--mode",
        "tprime",
        "--emit-certificate",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: TranscriptDocument = serde_json::from_slice(&out.stdout).unwrap();
    let cert = doc.certificate.clone().unwrap();
    assert!(doc.transcript().verify(&cert).unwrap());
    assert!(doc.end.is_tree());

    let dir = tempfile::tempdir().unwrap();
    let path = write_temp(&dir, "t.json", &stdout(&out));
    let v = ade(&["verify", &path]);
    assert_eq!(v.status.code(), Some(0));
    assert!(stdout(&v).contains("certificate: verified"));
}

#[test]
fn star_with_four_leaves_is_not_positive() {
    let star = fixture("k14.sg");
    let out = ade(&["classify", star.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stdout(&out).contains("witness: (2, -1, -1, -1, -1)"));

    let out = ade(&["classify", star.to_str().unwrap(), "--json"]);
    assert_eq!(out.status.code(), Some(4));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["definiteness"]["witness"], serde_json::json!([2, -1, -1, -1, -1]));
    assert_eq!(v["det"], 0);

    let out = ade(&["reduce", star.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn braid_trefoil() {
    let out = ade(&["braid", "analyze", "s1 s1 s1", "--reduce"]);
    assert_eq!(out.status.code(), Some(0));
    let s = stdout(&out);
    assert!(s.contains("type: A_2"));
    assert!(s.contains("signature: 2"));
    assert!(s.contains("determinant: 3"));

    let out = ade(&["braid", "analyze", "s1 s1 s1", "--reduce", "--json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((v["signature"].as_i64(), v["det"].as_i64()), (Some(2), Some(3)));
    assert_eq!(v["ade"], serde_json::json!(["A_2"]));
    assert_eq!(v["reductions"].as_array().unwrap().len(), 1);
}

#[test]
fn braid_without_maximal_signature() {
    let word = "s1 s2 ".repeat(6);
    assert_eq!(ade(&["braid", "analyze", &word]).status.code(), Some(0));
    assert_eq!(ade(&["braid", "analyze", &word, "--reduce"]).status.code(), Some(4));
    assert_eq!(ade(&["braid", "analyze", "s0 x"]).status.code(), Some(2));
}

#[test]
fn json_output_is_byte_identical_across_runs() {
    let tri = fixture("triangle.sg");
    for args in [
        vec!["reduce", tri.to_str().unwrap(), "--json"],
        vec!["classify", tri.to_str().unwrap(), "--json"],
        vec!["minors", "--max-n", "7", "--json"],
    ] {
        let a = ade(&args);
        let b = ade(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write_temp(&dir, "bad.sg", "graph signed\nv 0\ne 0 9 +\n");
    assert_eq!(ade(&["classify", &bad]).status.code(), Some(2));
    assert_eq!(ade(&["classify", "/nonexistent.sg"]).status.code(), Some(2));
    assert_eq!(ade(&["classify", &bad, "--frobnicate"]).status.code(), Some(2));
    assert_eq!(ade(&["nonsense"]).status.code(), Some(2));

    // All-positive K5 is positive but has no sequence of t'-moves.
    let k5 = SignedGraph::on_range(5, (0..5).flat_map(|i| (i + 1..5).map(move |j| (i, j, Sign::Pos)))).unwrap();
    let k5 = write_temp(&dir, "k5.sg", &k5.to_text());
    assert_eq!(ade(&["reduce", &k5, "--mode", "t"]).status.code(), Some(0));
    assert_eq!(ade(&["reduce", &k5, "--mode", "tprime"]).status.code(), Some(5));
    assert_eq!(ade(&["reduce", &k5, "--mode", "checkerboard"]).status.code(), Some(3));

    let split = write_temp(&dir, "split.sg", "graph signed\nv 0\nv 1\nv 2\ne 0 1 +\n");
    assert_eq!(ade(&["reduce", &split]).status.code(), Some(3));
    assert_eq!(ade(&["classify", &split]).status.code(), Some(0));
}

#[test]
fn dot_output_marks_negative_edges() {
    let dir = tempfile::tempdir().unwrap();
    let g = write_temp(&dir, "p.sg", "graph signed\nv 0\nv 1\nv 2\ne 0 1 -\ne 1 2 +\n");
    let dot = dir.path().join("p.dot");
    let out = ade(&["reduce", &g, "--dot", dot.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(dot).unwrap();
    assert!(text.contains("graph start {") && text.contains("graph end {"));
    assert!(text.contains("0 -- 1 [label=\"\u{2212}\", style=dashed];"));
    assert!(text.contains("[label=\"+\"]"));
}

#[test]
fn checkerboard_commands() {
    let dir = tempfile::tempdir().unwrap();
    let diamond = SignedGraph::on_range(
        4,
        [
            (0, 1, Sign::Pos),
            (1, 2, Sign::Pos),
            (2, 3, Sign::Pos),
            (3, 0, Sign::Pos),
            (0, 2, Sign::Pos),
        ],
    )
    .unwrap();
    let p = checkerboard_embedding(&diamond).unwrap();
    let good = write_temp(&dir, "good.pg", &p.to_text());
    let out = ade(&["checkerboard", "validate", &good]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("valid checkerboard graph"));

    // Reverse one arc of the chord: the two bounded faces stop being directed.
    let text = p.to_text();
    let (t, h) = p.arc(0, 2).unwrap();
    let flipped = text.replace(&format!("dir {t} {h}\n"), &format!("dir {h} {t}\n"));
    let bad = write_temp(&dir, "bad.pg", &flipped);
    let out = ade(&["checkerboard", "validate", &bad, "--json"]);
    assert_eq!(out.status.code(), Some(3));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["valid"], false);

    let out = ade(&["checkerboard", "reduce", &good, "--emit-certificate"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: TranscriptDocument = serde_json::from_slice(&out.stdout).unwrap();
    assert!(doc.transcript().verify(&doc.certificate.unwrap()).unwrap());
}

#[test]
fn oracle_and_minors() {
    let out = ade(&["oracle", "--suite", "lemma33", "--max-n", "5", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["failures"].as_array().unwrap().is_empty());
    assert_eq!(
        ade(&["oracle", "--suite", "lemma33", "--max-n", "99"]).status.code(),
        Some(2)
    );

    let out = ade(&["minors", "--json"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    let names: Vec<&str> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["name"].as_str().unwrap())
        .collect();
    assert_eq!(names.len(), 8);
    assert!(names.contains(&"E~8"));
}
