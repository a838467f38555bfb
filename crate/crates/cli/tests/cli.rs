//! End-to-end checks of the binary: subcommand wiring, exit codes, and
//! byte-identical JSON output for identical inputs.

use std::io::Write;
use std::process::{Command, Output, Stdio};

fn run(args: &[&str], stdin: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_semistable"));
    cmd.args(args).stdout(Stdio::piped()).stderr(Stdio::piped());
    if stdin.is_some() {
        cmd.stdin(Stdio::piped());
    } else {
        cmd.stdin(Stdio::null());
    }
    let mut child = cmd.spawn().expect("binary runs");
    if let Some(text) = stdin {
        child.stdin.as_mut().unwrap().write_all(text.as_bytes()).unwrap();
    }
    child.wait_with_output().expect("binary exits")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

const GOOD_ELLIPTIC: &str = r#"{"d":1,"p":0,"t":0,"a":1,"t_v":0,"a_v":0,"deg_lambda":1}"#;

#[test]
fn bounds_report_values() {
    let out = run(&["bounds"], Some(GOOD_ELLIPTIC));
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["N"]["value"], "12");
    assert_eq!(v["q_bound"], 3);
    let orders: Vec<&str> =
        v["admissible_orders"].as_array().unwrap().iter().map(|o| o["value"].as_str().unwrap()).collect();
    assert_eq!(orders, ["1", "2", "3", "4", "6"]);
}

#[test]
fn bounds_output_is_deterministic() {
    let a = stdout(&run(&["bounds"], Some(GOOD_ELLIPTIC)));
    let b = stdout(&run(&["bounds"], Some(GOOD_ELLIPTIC)));
    assert_eq!(a, b);
}

#[test]
fn jn_subcommand() {
    let out = run(&["jn", "2"], None);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), r#"{"n":2,"j":{"factored":"2^3 * 3","value":"24"}}"#);
    let text = stdout(&run(&["jn", "2", "--format", "text"], None));
    assert_eq!(text.trim(), "J(2) = 2^3 * 3 = 24");
}

#[test]
fn snf_subcommand_verifies() {
    let out = run(&["snf"], Some(r#"[["2","4"],["6","8"]]"#));
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["d"], serde_json::json!([["2", "0"], ["0", "4"]]));
}

#[test]
fn sp_orders_subcommand() {
    let out = run(&["sp-orders", "--m", "1", "--ell", "3", "--exhaustive"], None);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["orders"], serde_json::json!([1, 2, 3, 4, 6]));
    assert_eq!(v["group_order"]["value"], "24");
}

#[test]
fn sampled_spectra_are_reproducible() {
    let args = ["sp-orders", "--m", "2", "--ell", "5", "--samples", "300", "--seed", "9"];
    let a = stdout(&run(&args, None));
    let b = stdout(&run(&args, None));
    assert_eq!(a, b);
}

#[test]
fn perfectize_subcommand() {
    let input = r#"{
        "form": {"ring": {"kind": "localized_at", "ell": 3},
                 "kind": "alternating",
                 "gram": [["0","3"],["-3","0"]]},
        "generators": []
    }"#;
    let out = run(&["perfectize"], Some(input));
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["form"]["gram"], serde_json::json!([["0", "1"], ["-1", "0"]]));
    assert_eq!(v["precision"], serde_json::Value::Null);
}

#[test]
fn advice_for_semistable_input() {
    let out = run(&["advice"], Some(r#"{"d":2,"p":0,"t":1,"a":1,"t_v":1,"a_v":1}"#));
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["code"], "no_extension_needed");
}

#[test]
fn malformed_input_exits_2_with_error_object() {
    let out = run(&["bounds"], Some("not json"));
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["error"]["kind"], "input_error");

    // valid JSON, invalid data
    let out = run(&["bounds"], Some(r#"{"d":2,"p":0,"t":0,"a":1,"t_v":0,"a_v":0}"#));
    assert_eq!(out.status.code(), Some(2));

    // exhaustive over budget is an input-class error too
    let out = run(&["sp-orders", "--m", "3", "--ell", "13", "--exhaustive"], None);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["error"]["message"].as_str().unwrap().contains("sampled"));
}
