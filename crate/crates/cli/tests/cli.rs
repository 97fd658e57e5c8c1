use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

fn posred(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_posred"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn corpus_file(text: &str) -> tempfile::NamedTempFile {
    let mut file = tempfile::NamedTempFile::new().unwrap();
    file.write_all(text.as_bytes()).unwrap();
    file
}

// Structural check against the transcript schema.
fn assert_transcript_schema(v: &Value) {
    let obj = v.as_object().unwrap();
    let mut keys: Vec<_> = obj.keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(keys, ["input", "iterations", "verdict", "wellFormed"]);
    assert!(v["input"].is_string());
    assert!(v["wellFormed"].is_boolean());
    assert!(["accept", "reject"].contains(&v["verdict"].as_str().unwrap()));
    for it in v["iterations"].as_array().unwrap() {
        assert!(it["i"].is_u64());
        assert!(["FIX_TRUE", "FIX_FALSE", "ACCEPT_BOTH", "REJECT_BOTH"].contains(&it["case"].as_str().unwrap()));
        for q in it["queries"].as_array().unwrap() {
            assert!(q["string"].is_string());
            assert!(["0", "1"].contains(&q["tag"].as_str().unwrap()));
            assert!(q["answer"].is_boolean());
        }
    }
}

fn assert_report_schema(v: &Value) {
    let mut keys: Vec<_> = v.as_object().unwrap().keys().map(String::as_str).collect();
    keys.sort();
    assert_eq!(keys, ["formula", "mode", "pairsChecked", "result", "seed", "universeSize"]);
    assert!(["exhaustive", "sampled"].contains(&v["mode"].as_str().unwrap()));
    assert!(v["universeSize"].is_u64() && v["pairsChecked"].is_u64());
    assert!(v["seed"].is_null() || v["seed"].is_u64());
    match &v["result"] {
        Value::String(s) => assert_eq!(s, "ok"),
        Value::Object(o) => {
            assert!(o["S"].is_array() && o["T"].is_array());
        }
        other => panic!("bad result {other}"),
    }
}

#[test]
fn decide_verdicts_and_exit_codes() {
    let out = posred(&["decide", "x1"]);
    assert_eq!(stdout(&out).trim(), "accept");
    assert_eq!(code(&out), 0);
    let out = posred(&["decide", "!x1"]);
    assert_eq!(stdout(&out).trim(), "reject");
    assert_eq!(code(&out), 1);
}

#[test]
fn decide_trace_lists_four_queries() {
    let out = posred(&["decide", "(!x1|x2)", "--trace"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("accept\n"));
    assert_eq!(text.matches(" query ").count(), 4);
    assert_eq!(text.matches("case FIX_TRUE").count(), 2);
}

#[test]
fn decide_json_follows_schema() {
    let out = posred(&["decide", "(!x1|x2)", "--json"]);
    let v = json(&out);
    assert_transcript_schema(&v);
    assert_eq!(v["verdict"], "accept");
    assert_eq!(v["iterations"].as_array().unwrap().len(), 2);
    assert_eq!(v["iterations"][0]["queries"][0]["string"], "(!1|x2)0");
}

#[test]
fn decide_parse_error() {
    let out = posred(&["decide", "zzz"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a formula"));
    let out = posred(&["decide", "x0", "--json"]);
    assert_eq!(code(&out), 2);
    let v = json(&out);
    assert_transcript_schema(&v);
    assert_eq!(v["verdict"], "reject");
    assert_eq!(v["wellFormed"], false);
}

#[test]
fn lexmax_outputs() {
    let out = posred(&["lexmax", "((x1|x2)&(!x1|!x2))"]);
    assert_eq!(stdout(&out).trim(), "10");
    assert_eq!(code(&out), 0);
    let out = posred(&["lexmax", "(x1&!x1)"]);
    assert_eq!(stdout(&out).trim(), "UNSAT");
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&posred(&["lexmax", "x2"])).trim(), "11");
    assert_eq!(code(&posred(&["lexmax", "(x1&"])), 2);
}

#[test]
fn equivalence_on_curated_corpus() {
    let path = concat!(env!("CARGO_MANIFEST_DIR"), "/../core/corpus/curated.txt");
    let out = posred(&["verify-equivalence", "--corpus", path]);
    assert_eq!(code(&out), 0, "{}", stdout(&out));
    assert!(stdout(&out).contains(" 0 mismatches"));
}

#[test]
fn equivalence_on_random_formulas() {
    let out = posred(&["verify-equivalence", "--random", "2000", "--max-vars", "8", "--seed", "7", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["checked"], 2000);
    assert_eq!(v["mismatches"].as_array().unwrap().len(), 0);
}

#[test]
fn equivalence_reports_malformed_corpus_line() {
    let file = corpus_file("# comment\nx1\n\n(x1&\n");
    let out = posred(&["verify-equivalence", "--corpus", file.path().to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 4"));
}

#[test]
fn positivity_exhaustive_single_formula() {
    let out = posred(&["verify-positivity", "x1", "--exhaustive", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_report_schema(&v);
    assert_eq!(v["pairsChecked"], 9);
    assert_eq!(v["result"], "ok");
}

#[test]
fn positivity_sampled_single_formula() {
    let out = posred(&["verify-positivity", "(x1&(x2|x3))", "--samples", "10000", "--seed", "3", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_report_schema(&v);
    assert_eq!(v["mode"], "sampled");
    assert_eq!(v["seed"], 3);
    assert_eq!(v["pairsChecked"], 10000);
}

#[test]
fn positivity_exhaustive_bound() {
    let out = posred(&["verify-positivity", "(x1&(x2&(x3&x4)))", "--exhaustive"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--samples"));
}

#[test]
fn positivity_over_corpus_and_mutant() {
    let file = corpus_file("x1\n(x1|!x2)\n((x1&x2)|x3)\n");
    let path = file.path().to_str().unwrap();
    let out = posred(&["verify-positivity", "--corpus", path, "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 3);
    reports.iter().for_each(assert_report_schema);
    assert_eq!(reports[2]["mode"], "sampled");

    let out = posred(&["verify-positivity", "x1", "--exhaustive", "--machine", "swap-both-cases", "--json"]);
    assert_eq!(code(&out), 1);
    let v = json(&out);
    assert_report_schema(&v);
    assert_eq!(v["result"]["S"], serde_json::json!([]));
}

#[test]
fn tree_dumps() {
    let out = posred(&["tree", "x1", "--json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let edges = v["root"]["edges"].as_array().unwrap();
    assert_eq!(edges.len(), 4);
    assert!(edges.iter().all(|e| e["child"]["kind"] == "leaf"));
    assert_eq!(edges[0]["case"], "FIX_TRUE");
    assert_eq!(edges[0]["child"]["verdict"], "accept");
    assert_eq!(edges[1]["child"]["verdict"], "reject");

    let out = posred(&["tree", "(x1&x2)"]);
    let text = stdout(&out);
    assert!(text.contains("queries (6):"));
    let v = json(&posred(&["tree", "(x1&x2)", "--json"]));
    assert_eq!(v["queries"].as_array().unwrap().len(), 6);

    assert_eq!(code(&posred(&["tree", "x11"])), 2);
}

#[test]
fn oracle_answers() {
    let out = posred(&["oracle", "x10"]);
    assert_eq!(stdout(&out).trim(), "yes");
    assert_eq!(code(&out), 0);
    let out = posred(&["oracle", "x11"]);
    assert_eq!(stdout(&out).trim(), "no");
    assert_eq!(code(&out), 1);
    let out = posred(&["oracle", "(x1&!x1)1", "--one-query"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.starts_with("yes\n"));
    assert!(text.contains("sat calls: 1"));
    let v = json(&posred(&["oracle", "(x1&!x1)1", "--one-query", "--json"]));
    assert_eq!(v["satCalls"], 1);
    assert_eq!(v["satCall"]["satisfiable"], false);
    // Malformed bodies and missing tags answer no.
    assert_eq!(code(&posred(&["oracle", "zz0"])), 1);
    assert_eq!(code(&posred(&["oracle", "x1&"])), 1);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&posred(&["decide"])), 2);
    assert_eq!(code(&posred(&["nonsense"])), 2);
    assert_eq!(code(&posred(&["verify-positivity", "x1", "--exhaustive", "--samples", "5"])), 2);
}
