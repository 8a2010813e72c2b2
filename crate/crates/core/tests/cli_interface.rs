//! End-to-end checks of the binary: output formats, schema conformance,
//! exit codes and bit-reproducibility.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_revspy"))
}

fn run_ok(args: &[&str]) -> String {
    let out = bin().args(args).output().expect("binary runs");
    assert!(
        out.status.success(),
        "expected success for {args:?}, stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).expect("utf8 output")
}

fn run_raw(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn schema_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../schemas")
        .join(name)
}

/// Minimal JSON-Schema validation: type, required, properties, items, enum,
/// anyOf. Covers exactly the subset the shipped schemas use.
fn validate(schema: &Value, value: &Value) -> Result<(), String> {
    if let Some(variants) = schema.get("enum").and_then(Value::as_array) {
        if !variants.contains(value) {
            return Err(format!("{value} not in enum {variants:?}"));
        }
        return Ok(());
    }
    if let Some(any) = schema.get("anyOf").and_then(Value::as_array) {
        for sub in any {
            if validate(sub, value).is_ok() {
                return Ok(());
            }
        }
        return Err(format!("{value} matches no anyOf branch"));
    }
    if let Some(ty) = schema.get("type") {
        let types: Vec<&str> = match ty {
            Value::String(s) => vec![s.as_str()],
            Value::Array(a) => a.iter().filter_map(Value::as_str).collect(),
            _ => vec![],
        };
        let ok = types.iter().any(|t| match *t {
            "object" => value.is_object(),
            "array" => value.is_array(),
            "string" => value.is_string(),
            "integer" => value.as_i64().is_some() || value.as_u64().is_some(),
            "number" => value.is_number(),
            "boolean" => value.is_boolean(),
            "null" => value.is_null(),
            _ => false,
        });
        if !ok {
            return Err(format!("{value} is not of type {types:?}"));
        }
    }
    if let Some(required) = schema.get("required").and_then(Value::as_array) {
        for key in required.iter().filter_map(Value::as_str) {
            if value.get(key).is_none() {
                return Err(format!("missing required field '{key}'"));
            }
        }
    }
    if let (Some(props), Some(obj)) = (
        schema.get("properties").and_then(Value::as_object),
        value.as_object(),
    ) {
        for (key, sub) in props {
            if let Some(v) = obj.get(key) {
                validate(sub, v).map_err(|e| format!("{key}: {e}"))?;
            }
        }
    }
    if let (Some(items), Some(arr)) = (schema.get("items"), value.as_array()) {
        for (i, v) in arr.iter().enumerate() {
            validate(items, v).map_err(|e| format!("[{i}]: {e}"))?;
        }
    }
    Ok(())
}

fn assert_schema(name: &str, json_text: &str) {
    let schema: Value =
        serde_json::from_str(&std::fs::read_to_string(schema_path(name)).unwrap()).unwrap();
    let value: Value = serde_json::from_str(json_text).unwrap();
    if let Err(e) = validate(&schema, &value) {
        panic!("{name} violation: {e}\n{json_text}");
    }
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join("revspy-cli-tests");
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn gen_writes_deterministic_edge_lists() {
    let a = run_ok(&["gen", "--n", "60", "--p", "0.3", "--seed", "7"]);
    let b = run_ok(&["gen", "--n", "60", "--p", "0.3", "--seed", "7"]);
    assert_eq!(a, b, "identical argv must give identical bytes");
    let c = run_ok(&["gen", "--n", "60", "--p", "0.3", "--seed", "8"]);
    assert_ne!(a, c);
    // parses back
    let header = a.lines().next().unwrap();
    assert!(header.starts_with("60 "));
}

#[test]
fn check_report_matches_schema_and_exit_codes() {
    let gpath = tmp("check.graph");
    std::fs::write(
        &gpath,
        run_ok(&["gen", "--n", "30", "--p", "0.5", "--seed", "3"]),
    )
    .unwrap();
    let g = gpath.to_str().unwrap();

    let exact = run_ok(&[
        "check",
        "--graph",
        g,
        "--property",
        "ec",
        "--l",
        "1",
        "--k",
        "1",
    ]);
    assert_schema("report.schema.json", &exact);

    let sampled = run_ok(&[
        "check",
        "--graph",
        g,
        "--property",
        "ec",
        "--l",
        "2",
        "--k",
        "2",
        "--mode",
        "sampled",
        "--trials",
        "50",
    ]);
    assert_schema("report.schema.json", &sampled);

    // budget refusal exits 2
    let refused = run_raw(&[
        "check",
        "--graph",
        g,
        "--property",
        "ec",
        "--l",
        "3",
        "--k",
        "3",
        "--budget",
        "100",
    ]);
    assert_eq!(refused.status.code(), Some(2));

    // domain error exits 1, json error object on stderr
    let bad = run_raw(&[
        "check",
        "--graph",
        g,
        "--property",
        "nonneigh",
        "--format",
        "json",
    ]);
    assert_eq!(bad.status.code(), Some(1));
    let err: Value = serde_json::from_slice(&bad.stderr).expect("structured stderr");
    assert_eq!(err["kind"], "domain");
}

#[test]
fn nonneighborhood_and_expansion_reports() {
    let gpath = tmp("nn.graph");
    std::fs::write(
        &gpath,
        run_ok(&["gen", "--n", "40", "--p", "0.4", "--seed", "5"]),
    )
    .unwrap();
    let g = gpath.to_str().unwrap();
    let rep = run_ok(&[
        "check",
        "--graph",
        g,
        "--property",
        "nonneigh",
        "--gnp-p",
        "0.4",
        "--beta",
        "2",
        "--alpha",
        "1",
        "--mode",
        "sampled",
        "--trials",
        "200",
    ]);
    assert_schema("report.schema.json", &rep);
    let rep = run_ok(&[
        "check",
        "--graph",
        g,
        "--property",
        "common-neighbor",
        "--cap",
        "20",
    ]);
    assert_schema("report.schema.json", &rep);
    let exp = run_ok(&[
        "check",
        "--graph",
        g,
        "--property",
        "expansion",
        "--set",
        "0,3",
        "--radius",
        "1",
        "--tol",
        "0.5",
    ]);
    let v: Value = serde_json::from_str(&exp).unwrap();
    assert!(v["ball_size"].is_number());

    // certified-sufficient mode: a dense small graph certifies a generous
    // threshold easily
    let rep = run_ok(&[
        "check",
        "--graph",
        g,
        "--property",
        "matching-set",
        "--gnp-p",
        "0.4",
        "--gamma",
        "3.0",
        "--delta",
        "0.3",
    ]);
    assert_schema("report.schema.json", &rep);
    let v: Value = serde_json::from_str(&rep).unwrap();
    assert_eq!(v["mode"], "certified-sufficient");
    assert_eq!(v["verdict"], "holds");
}

#[test]
fn play_trace_validates_and_replays() {
    let gpath = tmp("play.graph");
    std::fs::write(
        &gpath,
        run_ok(&["gen", "--n", "40", "--p", "0.5", "--seed", "2"]),
    )
    .unwrap();
    let g = gpath.to_str().unwrap();
    let trace = run_ok(&[
        "play",
        "--graph",
        g,
        "--r",
        "6",
        "--m",
        "3",
        "--s",
        "2",
        "--rev",
        "ec-growth:j=1",
        "--spy",
        "random",
        "--horizon",
        "40",
        "--seed",
        "11",
    ]);
    assert_schema("trace.schema.json", &trace);

    // identical invocation, identical bytes
    let again = run_ok(&[
        "play",
        "--graph",
        g,
        "--r",
        "6",
        "--m",
        "3",
        "--s",
        "2",
        "--rev",
        "ec-growth:j=1",
        "--spy",
        "random",
        "--horizon",
        "40",
        "--seed",
        "11",
    ]);
    assert_eq!(trace, again);

    let tpath = tmp("play.trace");
    std::fs::write(&tpath, &trace).unwrap();
    let verdict = run_ok(&["replay", "--graph", g, "--trace", tpath.to_str().unwrap()]);
    assert!(verdict.starts_with("ok:"), "{verdict}");

    // a corrupted trace is rejected: the recorded meetings no longer match
    let mut v: Value = serde_json::from_str(&trace).unwrap();
    v["rounds"][0]["unguarded"] = serde_json::json!([5]);
    let bad_path = tmp("bad.trace");
    std::fs::write(&bad_path, serde_json::to_string(&v).unwrap()).unwrap();
    let bad = run_raw(&[
        "replay",
        "--graph",
        g,
        "--trace",
        bad_path.to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(1));

    // so is a teleporting token
    let mut v: Value = serde_json::from_str(&trace).unwrap();
    let from = v["rounds"][0]["rev"][0].as_u64().unwrap();
    let graph = revspy::graph::load_graph(&std::fs::read_to_string(&gpath).unwrap()).unwrap();
    let non_neighbor = (0..40u32)
        .find(|&w| w as u64 != from && !graph.neighbors(from as u32).contains(&w))
        .unwrap();
    v["rounds"][1]["rev"][0] = Value::from(non_neighbor);
    std::fs::write(&bad_path, serde_json::to_string(&v).unwrap()).unwrap();
    let bad = run_raw(&[
        "replay",
        "--graph",
        g,
        "--trace",
        bad_path.to_str().unwrap(),
    ]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn solve_and_spynum_text_output() {
    let gpath = tmp("p4.graph");
    std::fs::write(&gpath, "4 3\n0 1\n1 2\n2 3\n").unwrap();
    let g = gpath.to_str().unwrap();
    let solved = run_ok(&["solve", "--graph", g, "--r", "3", "--m", "2", "--s", "1"]);
    assert!(solved.starts_with("winner: spies"), "{solved}");
    let sigma = run_ok(&["spynum", "--graph", g, "--r", "3", "--m", "2"]);
    assert!(
        sigma.starts_with("1 (bounds 1 <= sigma <= 2: ok)"),
        "{sigma}"
    );
    // json forms
    let sigma_json = run_ok(&[
        "spynum", "--graph", g, "--r", "3", "--m", "2", "--format", "json",
    ]);
    let v: Value = serde_json::from_str(&sigma_json).unwrap();
    assert_eq!(v["sigma"], 1);
    assert_eq!(v["bounds_ok"], true);
}

#[test]
fn sweep_outputs_fixed_header_and_reproduces() {
    let cfg = tmp("sweep.conf");
    std::fs::write(
        &cfg,
        "n = 16\np = 0.5\nr = 3, 4\nm = 2\ntrials = 2\nseed = 5\nhorizon = 30\nsampled_trials = 100\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let csv1 = run_ok(&["sweep", "--config", c]);
    let csv2 = run_ok(&["sweep", "--config", c]);
    assert_eq!(csv1, csv2, "sweep CSV must be bit-identical across runs");
    assert!(csv1.starts_with(
        "n,p,r,m,regime,prediction,cert_lb,evidence_lb,exact_sigma,spy_survival,rev_win,seed\n"
    ));
    assert_eq!(csv1.lines().count(), 3);

    let json = run_ok(&["sweep", "--config", c, "--format", "json"]);
    let rows: Value = serde_json::from_str(&json).unwrap();
    let schema: Value = serde_json::from_str(
        &std::fs::read_to_string(schema_path("sweep_row.schema.json")).unwrap(),
    )
    .unwrap();
    for row in rows.as_array().unwrap() {
        if let Err(e) = validate(&schema, row) {
            panic!("sweep row violation: {e}\n{row}");
        }
    }
}

#[test]
fn solve_emit_strategy_trace_replays() {
    let gpath = tmp("emit.graph");
    std::fs::write(&gpath, "4 3\n0 1\n1 2\n2 3\n").unwrap();
    let g = gpath.to_str().unwrap();
    let out = run_ok(&[
        "solve",
        "--graph",
        g,
        "--r",
        "3",
        "--m",
        "2",
        "--s",
        "1",
        "--emit-strategy",
    ]);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["winner"], "spies");
    assert_eq!(v["optimal_play"]["verdict"], "spies-survived");
    assert_schema(
        "trace.schema.json",
        &serde_json::to_string(&v["optimal_play"]).unwrap(),
    );
    let tpath = tmp("emit.trace");
    std::fs::write(&tpath, serde_json::to_string(&v["optimal_play"]).unwrap()).unwrap();
    let rep = run_ok(&["replay", "--graph", g, "--trace", tpath.to_str().unwrap()]);
    assert!(rep.starts_with("ok:"), "{rep}");
}

#[test]
fn thread_cap_does_not_change_results() {
    let cfg = tmp("threads.conf");
    std::fs::write(
        &cfg,
        "n = 20\np = 0.5\nr = 4\nm = 2\ntrials = 2\nseed = 3\nhorizon = 30\nsampled_trials = 400\n",
    )
    .unwrap();
    let args = ["sweep", "--config", cfg.to_str().unwrap()];
    let serial = bin()
        .args(args)
        .env("REVSPY_THREADS", "1")
        .output()
        .expect("binary runs");
    let parallel = bin()
        .args(args)
        .env("REVSPY_THREADS", "2")
        .output()
        .expect("binary runs");
    assert!(serial.status.success() && parallel.status.success());
    assert_eq!(
        serial.stdout, parallel.stdout,
        "worker count must not change the rows"
    );
}

#[test]
fn solver_budget_refusal_exits_two() {
    let gpath = tmp("big.graph");
    std::fs::write(
        &gpath,
        run_ok(&["gen", "--n", "8", "--p", "0.5", "--seed", "1"]),
    )
    .unwrap();
    let out = run_raw(&[
        "solve",
        "--graph",
        gpath.to_str().unwrap(),
        "--r",
        "4",
        "--m",
        "2",
        "--s",
        "4",
        "--budget",
        "1000",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_flags_exit_nonzero() {
    let out = run_raw(&["gen", "--warp", "9"]);
    assert_ne!(out.status.code(), Some(0));
}
