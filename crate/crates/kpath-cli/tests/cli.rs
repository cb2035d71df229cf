use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kpath")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> (Value, i32) {
    let mut a = args.to_vec();
    a.extend(["--format", "json"]);
    let out = run(&a);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{args:?}: {e}\nstderr: {}", String::from_utf8_lossy(&out.stderr))
    });
    (v, out.status.code().expect("exit code"))
}

fn names(v: &Value) -> Vec<String> {
    v.as_array().expect("array").iter().map(|s| s.as_str().expect("string").to_string()).collect()
}

fn schema() -> jsonschema::JSONSchema {
    let text = include_str!("../../../docs/report.schema.json");
    let s: Value = serde_json::from_str(text).unwrap();
    jsonschema::JSONSchema::compile(&s).expect("valid schema")
}

fn dup_square_file() -> std::path::PathBuf {
    let p = std::env::temp_dir().join(format!("kpath-dup-{}.kg", std::process::id()));
    std::fs::write(
        &p,
        "rank: 2\nvertices:\n  a b c d\nedges:\n  e 1 b -> a\n  f 2 c -> a\n  g 1 d -> c\n  h 2 d -> b\nsquares:\n  e.h = f.g\n  e.h = f.g\n",
    )
    .unwrap();
    p
}

const RUNS: &[&[&str]] = &[
    &["validate", "--graph", "tg"],
    &["align", "--graph", "tg", "--element", "lambda"],
    &["align", "--graph", "tg", "--all", "--bound", "2,2", "--structure"],
    &["align", "--graph", "yee", "--bound", "1,1", "--structure"],
    &["align", "--graph", "tg-infinity"],
    &["paths", "--graph", "tg", "--cutoff", "2"],
    &["paths", "--graph", "tg", "--probe", "lambda"],
    &["paths", "--graph", "cycle"],
    &["groupoid", "--graph", "grid"],
    &["groupoid", "--graph", "grid", "--seed", "11"],
    &["groupoid", "--graph", "grid", "--spielberg"],
    &["groupoid", "--graph", "tg", "--compare-relative"],
];

#[test]
fn validate_exit_codes() {
    assert_eq!(run(&["validate", "--graph", "tg"]).status.code(), Some(0));
    let p = dup_square_file();
    let out = run(&["validate", "--graph", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("factorisation property violated"));
    std::fs::remove_file(p).ok();
    let out = run(&["validate", "--graph", "/nonexistent/graph.kg"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot read"));
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(run(&["align", "--graph", "tg", "--element", "nosuch"]).status.code(), Some(2));
    assert_eq!(run(&["paths", "--graph", "tg", "--bound", "2"]).status.code(), Some(2));
    assert_eq!(run(&["paths", "--graph", "tg", "--bound", "x,y"]).status.code(), Some(2));
}

#[test]
fn align_reports() {
    let (v, code) = json(&["align", "--graph", "tg", "--element", "lambda"]);
    assert_eq!(code, 0);
    assert_eq!(names(&v["not_fa"]), ["lambda"]);
    let cert = &v["verdicts"][0]["certificate"];
    assert_eq!((cert["mu"].as_str(), cert["nu"].as_str()), (Some("lambda"), Some("mu")));

    let (v, _) = json(&["align", "--graph", "tg", "--all", "--bound", "2,2"]);
    assert_eq!(names(&v["not_fa"]), ["v", "lambda", "mu"]);
    assert!(names(&v["unknown"]).is_empty());

    let (v, code) = json(&["align", "--graph", "grid", "--all"]);
    assert_eq!(code, 0);
    assert!(names(&v["not_fa"]).is_empty() && names(&v["unknown"]).is_empty());
    assert!(!names(&v["fa"]).is_empty());
}

#[test]
fn paths_reports() {
    let (v, _) = json(&["paths", "--graph", "tg", "--cutoff", "2"]);
    assert_eq!(names(&v["path_space_excludes"]), ["{v}", "down(lambda)", "down(mu)"]);
    assert_eq!(v["counts"]["filters"], 12);

    let (v, _) = json(&["paths", "--graph", "tg", "--probe", "lambda"]);
    let p = &v["compactness"][0];
    assert_eq!(p["kind"], "non_compact");
    assert_eq!(p["family"], "down(lambda.alpha[n])");
    assert_eq!(p["limit"], "{lambda, mu, v}");

    let (v, code) = json(&["paths", "--graph", "cycle"]);
    assert_eq!(code, 0);
    for row in v["filters"].as_array().unwrap() {
        let f = row["filter"].as_str().unwrap();
        assert!(f.starts_with("down(") || !f.contains(','), "{f}");
    }
}

#[test]
fn groupoid_reports() {
    let (v, code) = json(&["groupoid", "--graph", "grid", "--spielberg"]);
    assert_eq!(code, 0);
    assert_eq!(v["spielberg"]["pass"], true);
    assert_eq!(v["spielberg"]["classes"], v["spielberg"]["elements"]);

    let (v, code) = json(&["groupoid", "--graph", "tg", "--compare-relative"]);
    assert_eq!(code, 0);
    assert_eq!(v["comparison"]["counts"]["relative"], 3);
    assert_eq!(v["comparison"]["counts"]["path_space"], 2);

    let out = run(&["groupoid", "--graph", "tg", "--spielberg"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unsupported domain"));

    let (v, code) = json(&["groupoid", "--graph", "grid"]);
    assert_eq!(code, 0);
    assert_eq!(v["counts"]["elements"], 25);
}

#[test]
fn outputs_match_schema() {
    let s = schema();
    let p = dup_square_file();
    let bad = ["validate", "--graph", p.to_str().unwrap()];
    for args in RUNS.iter().copied().chain(std::iter::once(&bad[..])) {
        let (v, _) = json(args);
        let msgs: Vec<String> = match s.validate(&v) {
            Ok(()) => vec![],
            Err(errs) => errs.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
        };
        assert!(msgs.is_empty(), "{args:?}: {msgs:?}");
    }
    std::fs::remove_file(p).ok();
}

#[test]
fn json_is_deterministic() {
    for args in RUNS {
        let mut a = args.to_vec();
        a.extend(["--format", "json"]);
        assert_eq!(run(&a).stdout, run(&a).stdout, "{args:?}");
    }
}

#[test]
fn text_agrees_with_json() {
    let out = run(&["align", "--graph", "tg", "--all", "--bound", "2,2"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("not_fa: [v, lambda, mu]"), "{text}");
    let out = run(&["groupoid", "--graph", "tg", "--compare-relative"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("relative: 3") && text.contains("path_space: 2"), "{text}");
}
