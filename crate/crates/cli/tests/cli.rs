use std::io::Write;
use std::path::PathBuf;
use std::process::{Command, Output, Stdio};

use dp3_core::{build_diamond, Diamond, Matching, Order};

fn dp3(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dp3")).args(args).output().unwrap()
}

fn dp3_with_stdin(args: &[&str], input: &[u8], env: &[(&str, &str)]) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_dp3"))
        .args(args)
        .envs(env.iter().copied())
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(input).unwrap();
    child.wait_with_output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn count_all_methods_agree() {
    let o = dp3(&["count", "--order", "3", "--method", "all"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let counts: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["count"].as_str().unwrap()).collect();
    assert_eq!(counts, ["4096"; 3]);
    let methods: Vec<&str> = v.as_array().unwrap().iter().map(|r| r["method"].as_str().unwrap()).collect();
    assert_eq!(methods, ["closed_form", "backtracking", "kasteleyn"]);
}

#[test]
fn count_single_method() {
    let o = dp3(&["count", "--order", "5/2", "--method", "kasteleyn"]);
    assert_eq!(stdout(&o).trim(), r#"{"count":"512","method":"kasteleyn","order":2.5}"#);
}

#[test]
fn build_round_trips() {
    let o = dp3(&["build", "--order", "2.5"]);
    assert!(o.status.success());
    let d = Diamond::from_json(stdout(&o).trim()).unwrap();
    assert_eq!(d, build_diamond(Order::from_halves(5)).unwrap());
    assert_eq!(d.to_json(), stdout(&o).trim());
}

#[test]
fn sample_is_seeded_and_traced() {
    let trace = scratch("trace").join("steps.jsonl");
    let a = dp3(&["sample", "--order", "3", "--seed", "9", "--trace", trace.to_str().unwrap()]);
    let b = dp3(&["sample", "--order", "3", "--seed", "9"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let d = build_diamond(Order::integer(3)).unwrap();
    let m = Matching::from_json(&d, &stdout(&a)).unwrap();
    assert!(m.is_perfect(&d).unwrap());
    let lines: Vec<serde_json::Value> =
        std::fs::read_to_string(&trace).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[5]["order"], 3);
    assert_eq!(lines[5]["tails_added"], 5);
}

#[test]
fn render_reads_a_sample_from_stdin() {
    let dir = scratch("render");
    let sample = dp3(&["sample", "--order", "2", "--seed", "1"]);
    let o = dp3_with_stdin(&["render", "--heights", "--ovals"], &sample.stdout, &[("DP3_OUT_DIR", dir.to_str().unwrap())]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let path = dir.join("diamond_2.svg");
    assert_eq!(stdout(&o).trim(), path.to_str().unwrap());
    let first = std::fs::read(&path).unwrap();
    assert!(String::from_utf8_lossy(&first).contains("<svg"));
    dp3_with_stdin(&["render", "--heights", "--ovals"], &sample.stdout, &[("DP3_OUT_DIR", dir.to_str().unwrap())]);
    assert_eq!(std::fs::read(&path).unwrap(), first);
}

#[test]
fn render_bare_diamond_to_file() {
    let path = scratch("bare").join("d3.svg");
    let o = dp3(&["render", "--order", "3", "-o", path.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(std::fs::read_to_string(&path).unwrap().trim_end().ends_with("</svg>"));
    assert_eq!(dp3(&["render", "--order", "3", "--heights"]).status.code(), Some(1));
}

#[test]
fn zpoly_prints_and_evaluates() {
    assert_eq!(stdout(&dp3(&["zpoly", "--order", "1"])).trim(), "1 + c + b*c + b*c^2");
    assert_eq!(stdout(&dp3(&["zpoly", "--order", "2", "--at", "1,1,1"])).trim(), "64");
    assert_eq!(stdout(&dp3(&["zpoly", "--order", "0.5", "--at", "1/3,5,7"])).trim(), "4/3");
    assert_eq!(dp3(&["zpoly", "--order", "1", "--at", "1,x,1"]).status.code(), Some(1));
}

#[test]
fn verify_passes() {
    let o = dp3(&["verify", "--max-order", "2.5"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["passed"], true);
}

#[test]
fn bad_flags_exit_two() {
    assert_eq!(dp3(&["count", "--order", "3", "--bogus"]).status.code(), Some(2));
    assert_eq!(dp3(&["count", "--order", "2.7"]).status.code(), Some(2));
    assert_eq!(dp3(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(dp3(&["count", "--order", "1", "--method", "guess"]).status.code(), Some(2));
}

#[test]
fn foreign_matching_is_rejected() {
    let o = dp3_with_stdin(&["render"], br#"{"edges":[[0,99999]],"order":7}"#, &[]);
    assert_eq!(o.status.code(), Some(1));
}
