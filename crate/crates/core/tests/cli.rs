use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn ssproj(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ssproj")).args(args).output().expect("run ssproj")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

#[test]
fn analyze_four_corner() {
    let out = ssproj(&["analyze", "four_corner"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let mut ts: Vec<&str> = v["certified"].as_array().unwrap().iter().map(|c| c["t"].as_str().unwrap()).collect();
    ts.sort();
    assert_eq!(ts, ["-1/2", "-2", "1/2", "2"]);
    assert_eq!(v["status"], "complete");
}

#[test]
fn incomplete_scan_exits_3() {
    let out = ssproj(&["analyze", "rhombus_square", "--budget", "4", "--residue", "1e-9"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json(&out)["status"], "incomplete");
}

#[test]
fn emitted_document_round_trips_through_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sr.json");
    let out = ssproj(&["example", "sierpinski_right", "--emit", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let out = ssproj(&["project", path.to_str().unwrap(), "--slope", "-1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["verdict"], "interval");
    assert_eq!(v["exactness"], "exact");
    assert_eq!(v["length_sq"], "2");
}

#[test]
fn project_gap_and_vertical() {
    let v = json(&ssproj(&["project", "four_corner", "--slope", "0"]));
    assert_eq!(v["verdict"], "gap");
    assert_eq!(v["gap"]["lo"], "1/4");
    assert_eq!(v["gap"]["hi"], "3/4");
    let v = json(&ssproj(&["project", "rhombus_square", "--vertical"]));
    assert_eq!(v["verdict"], "interval");
    assert_eq!(v["t"], "vertical");
}

#[test]
fn project_on_infinite_group() {
    let out = ssproj(&["project", "irrational_rotation_demo", "--slope", "1/3"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "no-interval");
}

#[test]
fn moments_report() {
    let v = json(&ssproj(&["moments", "four_corner"]));
    assert_eq!(v["cov_exact"][0][0], "3/20");
    assert_eq!(v["cov_exact"][0][1], "0");
    assert_eq!(v["theorem_check"]["pass"], true);
    assert_eq!(v["theorem_check"]["c2_over_12"], "3/20");
    let v = json(&ssproj(&["moments", "rhombus_square", "--no-check"]));
    assert_eq!(v["cov_exact"][0][1], "-1/15");
    assert!(v.get("theorem_check").is_none());
}

#[test]
fn dimension_report() {
    let v = json(&ssproj(&["dimension", "four_corner"]));
    assert_eq!(v["dimension"], "1");
    assert_eq!(v["ssc"]["verdict"], "separated");
    assert_eq!(v["rotation_group_order"], 1);
    let v = json(&ssproj(&["dimension", "irrational_rotation_demo"]));
    assert!(v["rotation_group_order"].is_null());
}

#[test]
fn witness_commands() {
    let dir = tempfile::tempdir().unwrap();
    let square = dir.path().join("square.json");
    fs::write(&square, r#"{"vertices": [["0","0"],["1","0"],["1","1"],["0","1"]]}"#).unwrap();
    let sq = square.to_str().unwrap();

    let v = json(&ssproj(&["witness", "four_corner", "--polygon", sq, "--slope", "0"]));
    assert_eq!(v["invariant"], true);
    assert_eq!(v["theta"]["witness"], false);
    let v = json(&ssproj(&["witness", "four_corner", "--polygon", sq, "--slope", "1/2"]));
    assert_eq!(v["theta"]["witness"], true);

    let out = ssproj(&["witness", "rhombus_square", "--polygon", sq, "--all-lines", "--audit", "200"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["every_line"]["verdict"], "counterexample");
    assert_eq!(v["every_line"]["audit"]["failures"], 0);
}

#[test]
fn render_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("pts.csv");
    let out = ssproj(&["render", "sierpinski_right", "--depth", "3", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("x,y\n"));
    assert_eq!(text.lines().count(), 28);

    let out = ssproj(&["render", "four_corner", "--points", "100", "--seed", "3", "--svg"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("<svg"));

    let svg = dir.path().join("angles.svg");
    let out = ssproj(&["analyze", "four_corner", "--svg", svg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(fs::read_to_string(&svg).unwrap().contains("class=\"certified\""));

    let out = ssproj(&["render", "four_corner", "--slope", "0", "--depth", "3"]);
    assert!(String::from_utf8(out.stdout).unwrap().contains("class=\"gap\""));
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r#"{"name": "x", "maps": [{"r": "3/2", "v": ["0", "0"]}]}"#).unwrap();
    let out = ssproj(&["analyze", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ratio"));

    fs::write(&bad, "not json").unwrap();
    assert_eq!(ssproj(&["analyze", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(ssproj(&["analyze", "no_such_thing"]).status.code(), Some(2));
    assert_eq!(ssproj(&["project", "four_corner", "--slope", "x/y"]).status.code(), Some(2));
    assert_eq!(ssproj(&["example", "nope"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(ssproj(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(ssproj(&["analyze"]).status.code(), Some(1));
    assert_eq!(ssproj(&["project", "four_corner"]).status.code(), Some(1));
    assert_eq!(ssproj(&["project", "four_corner", "--slope", "1", "--vertical"]).status.code(), Some(1));
    assert_eq!(ssproj(&["--help"]).status.code(), Some(0));
    assert_eq!(ssproj(&["--version"]).status.code(), Some(0));
}

#[test]
fn example_listing() {
    let out = ssproj(&["example"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 6);
    let v = json(&ssproj(&["example", "rhombus_square"]));
    assert_eq!(v["ip_count"], 4);
}
