use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use destab_cli::format::{CheckReport, ClassifyReport, P1Report, ReduceReport};
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

fn destab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_destab"))
        .args(args)
        .env_remove("DESTAB_GUARD")
        .output()
        .unwrap()
}

fn destab_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_destab"))
        .args(args)
        .env(key, value)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn path(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

fn assert_no_floats(v: &Value) {
    match v {
        Value::Number(n) => assert!(n.is_i64() || n.is_u64(), "floating value {n}"),
        Value::Array(a) => a.iter().for_each(assert_no_floats),
        Value::Object(m) => m.values().for_each(assert_no_floats),
        _ => {}
    }
}

#[test]
fn weighted_rank6_reports_paper_values() {
    let o = destab(&["check", &path("rank6_weighted.json")]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["evaluation"]["value"], "-16");
    assert_eq!(v["evaluation"]["R"], "24");
    assert_eq!(v["evaluation"]["mu"], "-16");
    assert_eq!(v["evaluation"]["mu_via_gamma"], "-16");
    assert_eq!(v["constants"], serde_json::json!(["-4", "-12", "-20"]));
    let ks: Vec<u64> = v["k_checks"]
        .as_array()
        .unwrap()
        .iter()
        .map(|k| k["k"].as_u64().unwrap())
        .collect();
    assert_eq!(ks, vec![2, 3, 4]);
}

#[test]
fn unweighted_rank6_is_strictly_destabilized() {
    let o = destab(&["check", &path("rank6.json")]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    assert_eq!(v["decision"]["classification"], "StrictlyDestabilized");
    assert_eq!(v["decision"]["min_value"], "-4/3");
    assert!(v["decision"].get("regions").is_none());
}

#[test]
fn positive_constants_with_bottom_pivot_hold() {
    let o = destab(&["check", &path("bottom_pivot.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(json(&o)["decision"]["classification"], "StableOk");
}

#[test]
fn reduce_keeps_the_sharp_example() {
    let o = destab(&["reduce", &path("rank6.json")]);
    assert_eq!(o.status.code(), Some(1));
    let r: ReduceReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r.subset, vec![1, 2, 3]);
    assert_eq!(r.trace.len(), 3);
    assert!(r.trace.iter().all(|t| !t.violated));
}

#[test]
fn reduce_single_pivot_to_one_step() {
    let o = destab(&["reduce", &path("top_pivot.json")]);
    let r: ReduceReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r.subset.len(), 1);
    assert_eq!(r.decision.classification, "StrictlyDestabilized");
}

#[test]
fn reduce_refuses_non_violating() {
    let o = destab(&["reduce", &path("bottom_pivot.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("does not violate"));
}

#[test]
fn strict_mode_counts_zero_as_violation() {
    // the subfiltration {2,3} of the rank-six example reaches zero at positive weights
    let text = std::fs::read_to_string(data("rank6.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["steps"] = serde_json::json!([{ "rank": 3, "degree": 3 }, { "rank": 5, "degree": 5 }]);
    v["pivots"] = serde_json::json!([[1, 1, 3, 3], [1, 1, 1, 3], [2, 2, 2, 2]]);
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("pair.json");
    std::fs::write(&file, serde_json::to_string(&v).unwrap()).unwrap();
    let f = file.to_string_lossy();
    let semi = destab(&["check", &f]);
    assert_eq!(semi.status.code(), Some(0), "{}", stdout(&semi));
    assert_eq!(
        json(&semi)["decision"]["classification"],
        "MarginallyDestabilized"
    );
    assert_eq!(destab(&["check", "--strict", &f]).status.code(), Some(1));
}

#[test]
fn trace_and_timing_flags() {
    let o = destab(&["check", "--trace", &path("rank6.json")]);
    let regions = json(&o)["decision"]["regions"].as_array().unwrap().len();
    assert_eq!(regions, 3);
    let o = destab(&["--timing", "check", &path("rank6.json")]);
    assert!(json(&o).get("elapsed_ms").is_some());
}

#[test]
fn stdin_is_accepted() {
    let text = std::fs::read(data("rank6_weighted.json")).unwrap();
    let mut child = Command::new(env!("CARGO_BIN_EXE_destab"))
        .args(["check", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(&text).unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["evaluation"]["value"], "-16");
}

#[test]
fn output_is_deterministic_and_exact() {
    for args in [
        vec!["check", "--trace", "RANK6"],
        vec!["reduce", "RANK6"],
        vec!["p1", "check", "--degrees", "0,0,0", "--support", "123,222"],
    ] {
        let args: Vec<String> = args
            .iter()
            .map(|a| {
                if *a == "RANK6" {
                    path("rank6.json")
                } else {
                    a.to_string()
                }
            })
            .collect();
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let a = destab(&args);
        let b = destab(&args);
        assert_eq!(a.stdout, b.stdout);
        assert!(a.stdout.ends_with(b"\n"));
        assert_no_floats(&json(&a));
    }
}

#[test]
fn reports_round_trip() {
    let o = destab(&["check", "--trace", &path("rank6.json")]);
    let r: CheckReport = serde_json::from_slice(&o.stdout).unwrap();
    let again: CheckReport = serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(r, again);
    assert_eq!(serde_json::to_string_pretty(&r).unwrap() + "\n", stdout(&o));

    let o = destab(&["p1", "check", "--degrees=-2,1,1", "--support", "133,122"]);
    let p: P1Report = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(
        p,
        serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap()
    );
}

#[test]
fn guard_from_environment() {
    let o = destab_env(
        &["check", &path("rank6_weighted.json")],
        "DESTAB_GUARD",
        "3",
    );
    assert_eq!(json(&o)["evaluation"]["mu_via_gamma"], Value::Null);
    let o = destab_env(
        &["check", &path("rank6_weighted.json")],
        "DESTAB_GUARD",
        "lots",
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("DESTAB_GUARD"));
}

#[test]
fn input_errors_exit_two_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let broken = dir.path().join("broken.json");
    std::fs::write(&broken, "{\n  \"mode\": \"slope\",\n  \"arity\": oops\n}\n").unwrap();
    let o = destab(&["check", &broken.to_string_lossy()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line 3"), "{}", stderr(&o));

    let text = std::fs::read_to_string(data("rank6.json")).unwrap();
    let mut v: Value = serde_json::from_str(&text).unwrap();
    v["pivots"][1] = serde_json::json!([2, 2, 5, 4]);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, v.to_string()).unwrap();
    let o = destab(&["check", &bad.to_string_lossy()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("pivots[1]"), "{}", stderr(&o));

    v["pivots"] = serde_json::json!([[1, 1, 4, 4]]);
    v["delta"] = serde_json::json!(0.5);
    std::fs::write(&bad, v.to_string()).unwrap();
    assert_eq!(
        destab(&["check", &bad.to_string_lossy()]).status.code(),
        Some(2)
    );

    assert_eq!(
        destab(&["check", "/nonexistent/file.json"]).status.code(),
        Some(2)
    );
    assert_eq!(destab(&["comb", "f", "x", "3", "3"]).status.code(), Some(2));
    assert_eq!(destab(&["comb", "qbinom", "2", "5"]).status.code(), Some(2));
}

#[test]
fn hilbert_instance() {
    let v = serde_json::json!({
        "mode": "hilbert",
        "arity": 2,
        "total": { "rank": 2, "degree": 0, "hilbert": ["2", "2"] },
        "steps": [{ "rank": 1, "degree": 5, "hilbert": ["6", "1"] }],
        "delta": ["0", "1"],
        "pivots": [[1, 2]]
    });
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("h.json");
    std::fs::write(&file, v.to_string()).unwrap();
    let o = destab(&["check", &file.to_string_lossy()]);
    assert_eq!(o.status.code(), Some(1), "{}", stderr(&o));
    assert_eq!(
        json(&o)["decision"]["min_value"],
        serde_json::json!(["-10"])
    );
}

#[test]
fn comb_values() {
    assert_eq!(stdout(&destab(&["comb", "f", "3", "3", "6"])), "2\n");
    assert_eq!(stdout(&destab(&["comb", "maxp", "2", "7"])), "4\n");
    assert_eq!(stdout(&destab(&["comb", "partitions", "2", "5"])), "2\n");
    assert_eq!(
        stdout(&destab(&["comb", "qbinom", "4", "2"])),
        "1 + q + 2q^2 + q^3 + q^4\n"
    );
    let o = destab(&["comb", "verify", "3", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("pass\n"));
}

#[test]
fn p1_checks() {
    let o = destab(&["p1", "check", "--degrees", "0,0,0", "--support", "123"]);
    assert_eq!(o.status.code(), Some(0));
    let o = destab(&["p1", "check", "--degrees=-2,1,1", "--support", "133"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(json(&o)["violation"], "L_2");
    let o = destab(&["p1", "check", "--degrees=-2,1,1", "--support", "333"]);
    assert_eq!(o.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("t.json");
    std::fs::write(
        &file,
        r#"{"degrees":[0,0,0],"support":[[1,2,3],[2,2,2]],"delta":"1"}"#,
    )
    .unwrap();
    let o = destab(&["p1", "check", &file.to_string_lossy()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let flag = &json(&o)["flags"][0];
    assert_eq!(flag["flag"], "(1,12)");
    assert_eq!(flag["pivots"], serde_json::json!([[1, 2, 3], [2, 2, 2]]));
    assert_eq!(flag["decision"]["classification"], "MarginallyDestabilized");
}

#[test]
fn p1_classify_small_bound() {
    let o = destab(&[
        "p1",
        "classify",
        "--bound",
        "2",
        "--delta",
        "1",
        "--semistable-only",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let r: ClassifyReport = serde_json::from_slice(&o.stdout).unwrap();
    // only the trivial bundle admits semistable supports; every (-2,1,1)
    // support is destabilized by L_2 + L_3
    assert_eq!(r.semistable_degrees, vec![[0, 0, 0]]);
    assert!(r
        .rows
        .iter()
        .all(|row| row.semistable && row.k.single.iter().all(|&k| k >= 1)));
}
