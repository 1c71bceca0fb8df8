use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use serde_json::Value;

fn perdel(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_perdel"))
        .args(args)
        .env_remove("PERDEL_LONG_TESTS")
        .output()
        .unwrap()
}

fn perdel_stdin(args: &[&str], input: &[u8]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_perdel"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn json_of(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn squares_pipeline_and_svg() {
    let dir = tempfile::tempdir().unwrap();
    let form = write(
        dir.path(),
        "id.json",
        r#"{ "gram": [["1", "0"], ["0", "1"]] }"#,
    );
    let out = perdel(&["delaunay", "--form", &form]);
    let decomp = json_of(&out);
    assert_eq!(decomp["cells"].as_array().unwrap().len(), 1);
    let svg = perdel_stdin(&["svg"], &out.stdout);
    let text = String::from_utf8(svg.stdout).unwrap();
    let polys: Vec<&str> = text.lines().filter(|l| l.contains("<polygon")).collect();
    assert_eq!(polys.len(), 9);
    // every square has 4 corners and side 60 in drawing units
    for p in polys {
        let pts = p
            .split("points=\"")
            .nth(1)
            .unwrap()
            .split('"')
            .next()
            .unwrap();
        let xy: Vec<(f64, f64)> = pts
            .split(' ')
            .map(|c| {
                let (x, y) = c.split_once(',').unwrap();
                (x.parse().unwrap(), y.parse().unwrap())
            })
            .collect();
        assert_eq!(xy.len(), 4);
        for k in 0..4 {
            let (a, b) = (xy[k], xy[(k + 1) % 4]);
            assert!(((a.0 - b.0).hypot(a.1 - b.1) - 60.0).abs() < 1e-9);
        }
    }
    let path = write(
        dir.path(),
        "d.json",
        std::str::from_utf8(&out.stdout).unwrap(),
    );
    assert_eq!(json_of(&perdel(&["h0", "--decomp", &path]))["h0"], 1);
}

#[test]
fn outputs_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        assert!(
            perdel(&["catalog", "delta-rt", "--out", p.to_str().unwrap()])
                .status
                .success()
        );
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let c1 = perdel(&["certify", "--decomp", a.to_str().unwrap()]);
    let c2 = perdel(&["certify", "--decomp", a.to_str().unwrap()]);
    assert_eq!(c1.stdout, c2.stdout);
}

#[test]
fn delta_rt_reports() {
    let dir = tempfile::tempdir().unwrap();
    let rt = dir.path().join("rt.json");
    let rt = rt.to_str().unwrap();
    assert!(perdel(&["catalog", "delta-rt", "--out", rt])
        .status
        .success());
    assert_eq!(json_of(&perdel(&["h0", "--decomp", rt]))["h0"], 2);
    let et = json_of(&perdel(&["et", "--decomp", rt]));
    assert_eq!(et["h0"], 2);
    assert_eq!(et["cone_dim"], 1);
    assert_eq!(et["et_flag"], true);
    let cert = json_of(&perdel(&["certify", "--decomp", rt]));
    assert_eq!(cert["delaunay"], true);
    assert_eq!(cert["cone_dim"], 1);
}

#[test]
fn refinements_are_written_and_consumed() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("refs");
    assert!(perdel(&[
        "catalog",
        "rt-refinements",
        "--out-dir",
        out.to_str().unwrap()
    ])
    .status
    .success());
    let mut files: Vec<_> = std::fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    files.sort();
    assert_eq!(files.len(), 4);
    let mut delaunay = 0;
    for f in files {
        let r: Value = serde_json::from_slice(&std::fs::read(&f).unwrap()).unwrap();
        let d = write(dir.path(), "d.json", &r["decomposition"].to_string());
        let cert = json_of(&perdel(&["certify", "--decomp", &d]));
        assert_eq!(cert["delaunay"], r["symmetric"]);
        if cert["delaunay"] == true {
            delaunay += 1;
        } else {
            assert!(cert["farkas"]["terms"]
                .as_array()
                .is_some_and(|t| !t.is_empty()));
        }
    }
    assert_eq!(delaunay, 2);
}

#[test]
fn catalog_forms_and_list() {
    let list = json_of(&perdel(&["catalog", "list"]));
    assert!(list["forms"]
        .as_array()
        .unwrap()
        .iter()
        .any(|f| f["name"] == "E8"));
    let d5 = json_of(&perdel(&["catalog", "form", "--name", "Dn", "--n", "5"]));
    assert_eq!(d5["dim"], 5);
    let bad = perdel(&["catalog", "form", "--name", "B3", "--n", "3"]);
    assert_eq!(bad.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&bad.stderr).unwrap();
    assert_eq!(err["error"], "UnknownName");
}

#[test]
fn graph_and_scan() {
    let dir = tempfile::tempdir().unwrap();
    let k33 = write(
        dir.path(),
        "k33.json",
        r#"{ "vertices": 6, "edges": [[0,3],[0,4],[0,5],[1,3],[1,4],[1,5],[2,3],[2,4],[2,5]] }"#,
    );
    let r = json_of(&perdel(&["graph", "--in", &k33, "--report"]));
    assert_eq!(r["genus"], 4);
    assert_eq!(r["planar"], false);
    assert_eq!(r["kuratowski"]["kind"], "K33");
    assert_eq!(r["et_flag"], true);
    let plain = json_of(&perdel(&["graph", "--in", &k33]));
    assert_eq!(plain["graphic_form"]["dim"], 4);
    let table = json_of(&perdel(&["scan", "--corpus", "stable", "--max-genus", "3"]));
    let rows = table.as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows
        .iter()
        .all(|r| r["et_flag"] == false && r["planar"] == true));
    let text = perdel(&[
        "scan",
        "--corpus",
        "named",
        "--max-genus",
        "3",
        "--format",
        "text",
    ]);
    assert!(String::from_utf8(text.stdout).unwrap().starts_with("graph"));
}

#[test]
fn moment_command() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(
        dir.path(),
        "s.json",
        r#"{ "points": [[0,0],[2,0]], "weights": ["3", "1"] }"#,
    );
    let m = json_of(&perdel(&["moment", "--support", &s]));
    assert_eq!(m["moment"], serde_json::json!(["1/2", "0"]));
    let empty = write(dir.path(), "e.json", r#"{ "points": [], "weights": [] }"#);
    let out = perdel(&["moment", "--support", &empty]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "EmptySupport");
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = write(dir.path(), "g.json", "{ not json");
    assert_eq!(
        perdel(&["delaunay", "--form", &garbage]).status.code(),
        Some(2)
    );
    let asym = write(dir.path(), "a.json", r#"{ "gram": [[1, 2], [0, 1]] }"#);
    assert_eq!(
        perdel(&["delaunay", "--form", &asym]).status.code(),
        Some(2)
    );
    let indef = write(dir.path(), "i.json", r#"{ "gram": [[1, 0], [0, -1]] }"#);
    let out = perdel(&["delaunay", "--form", &indef]);
    assert_eq!(out.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "NotPositiveDefinite");
    assert_eq!(
        perdel(&["delaunay", "--form", "/nonexistent.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(perdel(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn window_scale_and_pullback_input() {
    let dir = tempfile::tempdir().unwrap();
    let a2 = write(dir.path(), "a2.json", r#"{ "gram": [[2, 1], [1, 2]] }"#);
    assert!(
        perdel(&["delaunay", "--form", &a2, "--window-scale", "1/2"])
            .status
            .success()
    );
    let strips = write(
        dir.path(),
        "strips.json",
        r#"{ "dim": 2, "fiber_rank": 1, "cells": [{ "dim": 1, "vertices": [[0], [1]] }], "walls": [] }"#,
    );
    let r = json_of(&perdel(&["h0", "--decomp", &strips]));
    assert_eq!(r["h0"], 2);
    assert_eq!(r["method"], "pullback");
}
