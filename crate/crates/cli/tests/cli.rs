use std::fs;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn depthwork(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_depthwork"))
        .args(args)
        .env_remove("DEPTHWORK_BUDGET_MB")
        .output()
        .expect("spawn depthwork")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn depth_table_csv_row_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("t.csv");
    let man = dir.path().join("m.json");
    let o = depthwork(&[
        "depth-table",
        "--families",
        "I",
        "--n-min",
        "4",
        "--n-max",
        "4",
        "--proper",
        "--csv",
        csv.to_str().unwrap(),
        "--manifest",
        man.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let text = fs::read_to_string(&csv).unwrap();
    assert_eq!(text.as_bytes(), &o.stdout[..]);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("family,n,m,formula,computed,multiplication,agree")
    );
    assert!(text.lines().any(|l| l == "I,4,3,2,2,2,true"), "{text}");
    assert_eq!(text.lines().count(), 5);

    let m: Value = serde_json::from_str(&fs::read_to_string(&man).unwrap()).unwrap();
    assert_eq!(m["command"], "depth-table");
    assert_eq!(m["exit_code"], 0);
    assert_eq!(m["parameters"]["args"]["n_max"], 4);
    let sha = m["output_sha256"].as_str().unwrap();
    assert_eq!(sha.len(), 64);

    // Same invocation, same digest.
    let man2 = dir.path().join("m2.json");
    let o2 = depthwork(&[
        "depth-table",
        "--families",
        "I",
        "--n-min",
        "4",
        "--n-max",
        "4",
        "--proper",
        "--jobs",
        "3",
        "--manifest",
        man2.to_str().unwrap(),
    ]);
    assert_eq!(o2.stdout, o.stdout);
    let m2: Value = serde_json::from_str(&fs::read_to_string(&man2).unwrap()).unwrap();
    assert_eq!(m2["output_sha256"], m["output_sha256"]);
}

#[test]
fn small_n_is_a_usage_error() {
    let o = depthwork(&["depth-table", "--n-max", "2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n ≥ 3"));
}

#[test]
fn clap_errors_exit_two() {
    assert_eq!(
        depthwork(&["defines", "--family", "Q", "--n", "3", "--m", "2"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(depthwork(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn defines_reports_verdicts() {
    let o = depthwork(&[
        "defines", "--family", "T", "--n", "3", "--m", "2", "--i", "1",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["verdict"], "defines");
    let o = depthwork(&[
        "defines", "--family", "T", "--n", "3", "--m", "2", "--i", "2",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["verdict"], "not-defines");
}

#[test]
fn present_round_trips_through_defines() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("p.json");
    let o = depthwork(&[
        "present",
        "--family",
        "I",
        "--n",
        "3",
        "--m",
        "2",
        "--out",
        p.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = depthwork(&[
        "defines",
        "--family",
        "I",
        "--n",
        "3",
        "--m",
        "2",
        "--presentation",
        p.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert_eq!(stdout_json(&o)["verdict"], "defines");

    fs::write(&p, "{ not json").unwrap();
    let o = depthwork(&[
        "defines",
        "--family",
        "I",
        "--n",
        "3",
        "--m",
        "2",
        "--presentation",
        p.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn enumerate_and_kb_count_the_ideal() {
    let o = depthwork(&["enumerate", "--family", "PT", "--n", "3", "--m", "2"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v = stdout_json(&o);
    assert_eq!(v["classes"], v["ideal_size"]);

    let o = depthwork(&["kb", "--family", "I", "--n", "3", "--m", "1"]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v = stdout_json(&o);
    assert_eq!(
        v["normal_forms"].as_str().unwrap(),
        v["ideal_size"].to_string()
    );
}

#[test]
fn tiny_budget_is_inconclusive() {
    let args = [
        "enumerate",
        "--family",
        "T",
        "--n",
        "4",
        "--m",
        "3",
        "--size",
        "20",
    ];
    assert_eq!(depthwork(&args).status.code(), Some(1));
    let mut loose = args.to_vec();
    loose.push("--allow-inconclusive");
    assert_eq!(depthwork(&loose).status.code(), Some(0));
}

fn pm(entries: &[Option<usize>]) -> Value {
    json!({ "n": entries.len(), "entries": entries })
}

#[test]
fn derive_then_check_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let req = dir.path().join("req.json");
    let cert = dir.path().join("d.json");
    let word = [
        pm(&[Some(1), Some(2), None, None]),
        pm(&[None, Some(1), Some(2), None]),
        pm(&[Some(2), Some(3), None, None]),
    ];
    fs::write(
        &req,
        json!({"op": "reduce-word", "family": "I", "n": 4, "m": 3, "r": 1, "word": word})
            .to_string(),
    )
    .unwrap();
    let o = depthwork(&[
        "derive",
        "--request",
        req.to_str().unwrap(),
        "--out",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );

    let o = depthwork(&["derive", "--check", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["valid"], true);

    let mut d: Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    d["end"] = d["start"].clone();
    fs::write(&cert, d.to_string()).unwrap();
    let o = depthwork(&["derive", "--check", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stdout_json(&o)["valid"], false);
}

#[test]
fn derive_enforces_the_lemma_range() {
    let dir = tempfile::tempdir().unwrap();
    let req = dir.path().join("req.json");
    let a = pm(&[Some(1), Some(2), Some(3), None]);
    fs::write(
        &req,
        json!({"op": "reduce-word", "family": "I", "n": 4, "m": 3, "r": 2, "word": [a, a]})
            .to_string(),
    )
    .unwrap();
    let o = depthwork(&["derive", "--request", req.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("2m - n - 1"));

    fs::write(&req, r#"{"op":"equalize","family":"I"}"#).unwrap();
    assert_eq!(
        depthwork(&["derive", "--request", req.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn apply_rule_request() {
    let dir = tempfile::tempdir().unwrap();
    let req = dir.path().join("req.json");
    fs::write(
        &req,
        json!({
            "op": "apply-rule", "family": "I", "n": 4, "m": 3, "r": 1, "rule": "i-im-alpha",
            "alpha": pm(&[Some(1), Some(2), None, None]),
            "beta": pm(&[None, Some(1), Some(3), None]),
        })
        .to_string(),
    )
    .unwrap();
    let o = depthwork(&["derive", "--request", req.to_str().unwrap()]);
    // Either a certificate or a precondition failure; never a usage error.
    assert!(
        matches!(o.status.code(), Some(0) | Some(1)),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn counterexample_identities() {
    let o = depthwork(&[
        "counterexample",
        "--family",
        "T",
        "--n",
        "5",
        "--m",
        "3",
        "--r",
        "2",
        "--depth",
        "3",
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v = stdout_json(&o);
    assert_eq!(v["identities_hold"], true);
    assert_eq!(v["alpha_beta"], v["beta_beta"]);
    assert_eq!(v["product_rank"], 1);
}

#[test]
fn jclasses_counts() {
    let o = depthwork(&["jclasses", "--family", "T", "--n", "3", "--elements"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["size"], 27);
    let sizes: Vec<u64> = v["classes"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["count"].as_u64().unwrap())
        .collect();
    assert_eq!(sizes, vec![3, 18, 6]);
    let top = &v["classes"][2];
    assert_eq!(
        (top["l_classes"].as_u64(), top["r_classes"].as_u64()),
        (Some(1), Some(1))
    );
    assert_eq!(top["elements"].as_array().unwrap().len(), 6);
}

#[test]
fn budget_env_caps_enumeration() {
    let o = Command::new(env!("CARGO_BIN_EXE_depthwork"))
        .args(["enumerate", "--family", "T", "--n", "4", "--m", "3"])
        .env("DEPTHWORK_BUDGET_MB", "0")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(1));
    let o = Command::new(env!("CARGO_BIN_EXE_depthwork"))
        .args(["jclasses", "--family", "T", "--n", "3"])
        .env("DEPTHWORK_BUDGET_MB", "lots")
        .output()
        .unwrap();
    // Only commands that consult budgets read the variable.
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn derive_flag_form_on_the_i4_quadruple() {
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("pairs.json");
    let cert = dir.path().join("d.json");
    fs::write(
        &input,
        json!({
            "alpha": pm(&[Some(1), Some(2), None, None]),
            "beta": pm(&[Some(1), None, Some(2), None]),
            "gamma": pm(&[Some(1), Some(3), None, None]),
            "delta": pm(&[Some(1), Some(2), None, None]),
        })
        .to_string(),
    )
    .unwrap();
    let o = depthwork(&[
        "derive",
        "--op",
        "equalize",
        "--family",
        "I",
        "--n",
        "4",
        "--m",
        "3",
        "--r",
        "1",
        "--input",
        input.to_str().unwrap(),
        "--out",
        cert.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let o = depthwork(&["derive", "--check", cert.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn counterexample_range_is_checked() {
    let o = depthwork(&[
        "counterexample",
        "--family",
        "I",
        "--n",
        "3",
        "--m",
        "2",
        "--r",
        "1",
    ]);
    assert_eq!(o.status.code(), Some(1));
    let o = depthwork(&[
        "counterexample",
        "--family",
        "I",
        "--n",
        "4",
        "--m",
        "2",
        "--r",
        "1",
        "--depth",
        "0",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["alpha"], pm(&[Some(1), Some(2), None, None]));
    assert_eq!(v["beta"], pm(&[None, None, Some(1), Some(2)]));
}
