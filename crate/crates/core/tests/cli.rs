mod common;

use std::path::{Path, PathBuf};
use std::process::Command;

use common::criteria;
use serde_json::{json, Value};

const BIN: &str = env!("CARGO_BIN_EXE_edgerem");

struct Dir(PathBuf);

impl Dir {
    fn new(tag: &str) -> Self {
        let p = std::env::temp_dir().join(format!("edgerem-cli-{tag}-{}", std::process::id()));
        std::fs::create_dir_all(&p).unwrap();
        Dir(p)
    }

    fn file(&self, name: &str, v: &Value) -> String {
        let p = self.0.join(name);
        std::fs::write(&p, serde_json::to_string(v).unwrap()).unwrap();
        p.to_string_lossy().into_owned()
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).to_string_lossy().into_owned()
    }
}

impl Drop for Dir {
    fn drop(&mut self) {
        let _ = std::fs::remove_dir_all(&self.0);
    }
}

fn run(args: &[&str]) -> (i32, Value) {
    let o = Command::new(BIN).args(args).output().unwrap();
    let v = serde_json::from_slice(&o.stdout).unwrap_or(Value::Null);
    (o.status.code().unwrap(), v)
}

fn corpus(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/corpus")
        .join(format!("{name}.json"))
        .to_string_lossy()
        .into_owned()
}

fn single_edge() -> Value {
    json!({"vertices": ["a", "b"], "edges": [{"a": "a", "b": "b", "cap": "1"}],
        "sources": ["a"], "terminals": ["b"], "demand": [[1]]})
}

#[test]
fn validate_exit_codes() {
    let d = Dir::new("validate");
    assert_eq!(run(&["validate", &corpus("butterfly")]).0, 0);
    let mut bad = single_edge();
    bad["edges"][0]["cap"] = json!("0");
    let (code, out) = run(&["validate", &d.file("bad.json", &bad)]);
    assert_eq!(code, 2);
    assert_eq!(out["valid"], json!(false));
    assert_eq!(out["errors"][0]["kind"], json!("NonPositiveCapacity"));
    assert_eq!(run(&["validate", &d.path("missing.json")]).0, 3);
}

#[test]
fn analyze_reports_both_cases() {
    let (code, out) = run(&["analyze", &corpus("four_cycle"), "--edge", "a,c", "--lambda", "1/2"]);
    assert_eq!(code, 0);
    assert_eq!(out["case"], json!("path"));
    assert_eq!(out["c"], json!("8"));
    assert_eq!(out["f_lambda"], json!("4"));
    assert_eq!(out["path_case"]["alpha"], json!("2/3"));
    let (code, out) = run(&["analyze", &corpus("two_triangles"), "--edge", "c,x", "--lambda", "3/2"]);
    assert_eq!(code, 0);
    assert_eq!(out["case"], json!("bridge"));
    assert_eq!(out["f_lambda"], json!("3/2"));
    assert_eq!(run(&["analyze", &corpus("four_cycle"), "--edge", "a,b", "--lambda", "1"]).0, 2);
    assert_eq!(run(&["analyze", &corpus("four_cycle"), "--edge", "a,q", "--lambda", "1"]).0, 2);
}

#[test]
fn analyze_with_code_runs_the_chain() {
    let d = Dir::new("analyze");
    let g = common::four_cycle();
    let inst = d.file("c4.json", &serde_json::to_value(g.to_document()).unwrap());
    let code = d.file(
        "code.json",
        &json!({"form": "routing", "n": 2, "N": 2, "message_sizes": [2, 4], "routes": [
            {"source": 0, "terminal": 0, "path": ["a", "c"], "start": 1},
            {"source": 1, "terminal": 1, "path": ["b", "c", "d"], "start": 1}]}),
    );
    let (status, out) = run(&["analyze", &inst, "--edge", "a,c", "--lambda", "1/2", "--code", &code]);
    assert_eq!(status, 0);
    let v = &out["verification"];
    assert_eq!(v["final_check"]["measured_error"], json!("0"));
    assert_eq!(v["pass"], json!(true));
}

#[test]
fn transform_writes_code_and_names_failing_step() {
    let d = Dir::new("transform");
    let inst = d.file("single.json", &single_edge());
    let code = d.file(
        "code.json",
        &json!({"form": "routing", "n": 1, "N": 2, "message_sizes": [2], "routes": [
            {"source": 0, "terminal": 0, "path": ["a", "b"], "start": 1}]}),
    );
    let out = d.path("out.json");
    let chain = d.file("chain.json", &json!([{"op": "interleave"}]));
    assert_eq!(run(&["transform", &inst, &code, &chain, "--out", &out]).0, 0);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(written["N"], json!(4));
    let (status, report) = run(&["check", &inst, &out]);
    assert_eq!((status, &report["measured_error"]), (0, &json!("0")));

    let amp = d.file(
        "amp.json",
        &json!([{"op": "amplify", "params": {"m": 4, "family": "repetition", "epsilon": "1/4"}}]),
    );
    let (status, err) = run(&["transform", &inst, &code, &amp, "--out", &out]);
    assert_eq!(status, 2);
    assert_eq!(err["error"]["kind"], json!("DistanceTooSmall"));
    assert_eq!(err["error"]["step"], json!(0));
}

#[test]
fn check_exit_codes() {
    let d = Dir::new("check");
    let relay = d.file(
        "relay.json",
        &json!({"vertices": ["s", "r", "t"], "edges": [{"a": "s", "b": "r", "cap": "1"}, {"a": "r", "b": "t", "cap": "1"}],
            "sources": ["s"], "terminals": ["t"], "demand": [[1]]}),
    );
    let route = d.file(
        "route.json",
        &json!({"form": "routing", "n": 1, "N": 2, "message_sizes": [2], "routes": [
            {"source": 0, "terminal": 0, "path": ["s", "r", "t"], "start": 1}]}),
    );
    assert_eq!(run(&["check", &relay, &route]).0, 0);
    let constant = d.file(
        "constant.json",
        &json!({"form": "routing", "n": 1, "N": 2, "message_sizes": [2], "routes": []}),
    );
    let (status, out) = run(&["check", &relay, &constant, "--epsilon", "1/4"]);
    assert_eq!(status, 4);
    assert_eq!(out["measured_error"], json!("1/2"));
    let (status, _) = run(&["check", &relay, &route, "--mode", "exhaustive:1"]);
    assert_eq!(status, 5);
    let a = run(&["check", &relay, &constant, "--epsilon", "1/4", "--mode", "sampled:1000:42"]);
    let b = run(&["check", &relay, &constant, "--epsilon", "1/4", "--mode", "sampled:1000:42"]);
    assert_eq!(a, b);
}

#[test]
fn region_points_and_limits() {
    let d = Dir::new("region");
    let inst = d.file("single.json", &single_edge());
    let (status, out) = run(&["region", &inst]);
    assert_eq!(status, 0);
    assert_eq!(out["points"], json!([["1"]]));
    let (status, out) = run(&["region", &corpus("two_hop_line"), "--N", "2"]);
    assert_eq!(status, 0);
    assert_eq!(out["points"], json!([["1/2"]]));
    assert_eq!(run(&["region", &corpus("butterfly")]).0, 5);
}

#[test]
fn commands_are_deterministic() {
    criteria::cli_determinism(BIN).unwrap();
}
