mod common;

use common::{point_args, ss3};
use serde_json::Value;
use ss3_cli::report::Report;
use ss3_core::strata::A1Case;

fn run(args: &[&str]) -> (Option<i32>, String) {
    let out = ss3(args);
    (out.status.code(), String::from_utf8(out.stdout).unwrap())
}

fn with_point(head: &[&str], pt: &[String]) -> (Option<i32>, Value) {
    let mut args: Vec<&str> = head.to_vec();
    args.extend(pt.iter().map(String::as_str));
    let (code, out) = run(&args);
    (code, serde_json::from_str(&out).unwrap_or(Value::Null))
}

#[test]
fn mass_table_p2() {
    let (code, out) = run(&["mass", "table", "--p", "2"]);
    assert_eq!(code, Some(0));
    let r: Report = serde_json::from_str(&out).unwrap();
    assert_eq!(r.schema, "ss3/1");
    let masses: Vec<String> = r.results["rows"].as_array().unwrap().iter().map(|x| format!("{}/{}", x["mass"]["num"].as_str().unwrap(), x["mass"]["den"].as_str().unwrap()))
        .collect();
    assert!(masses.contains(&"1/82944".to_string()));
    assert!(masses.contains(&"1/2".to_string()));
    assert_eq!(masses.len(), 6);
}

#[test]
fn csv_and_table_formats() {
    let (code, csv) = run(&["--format", "csv", "mass", "table", "--p", "2"]);
    assert_eq!(code, Some(0));
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("label,d,in_d,l_p,mass,index"));
    assert_eq!(lines.next(), Some("A3,,,35,1/82944,1"));
    let (_, ledger) = run(&["--format", "csv", "verify", "counts", "--p", "2", "--max-i", "3"]);
    assert_eq!(ledger.lines().next(), Some("claim,expected,observed,match,flagged"));
    assert_eq!(ledger.lines().count(), 4);
    let (code, table) = run(&["--format", "table", "mass", "table", "--p", "3"]);
    assert_eq!(code, Some(0));
    assert!(table.trim_end().ends_with("checks, 0 failed"));
}

#[test]
fn report_roundtrips_through_json() {
    let (_, out) = run(&["verify", "counts", "--p", "3", "--max-i", "2"]);
    let r: Report = serde_json::from_str(&out).unwrap();
    assert_eq!(r.to_json(), out);
    assert!(r.passed());
    assert_eq!(r.command, ["verify", "counts", "--p", "3", "--max-i", "2"]);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["mass", "table", "--p", "9"]).0, Some(2));
    assert_eq!(run(&["no-such-command"]).0, Some(2));
    assert_eq!(run(&["classify", "--p", "2", "--m", "2", "--t", "1", "1", "1", "--u", "1", "0"]).0, Some(2));
    assert_eq!(run(&["atlas", "--p", "4"]).0, Some(2));
    assert_eq!(run(&["verify", "counts", "--p", "2", "--max-i", "2"]).0, Some(0));
}

#[test]
fn global_flags_do_not_change_the_report() {
    let (_, a) = run(&["verify", "counts", "--p", "2", "--max-i", "2"]);
    let (_, b) = run(&["--threads", "3", "verify", "counts", "--p", "2", "--max-i", "2"]);
    assert_eq!(a, b);
}

#[test]
fn classify_degree_three_point_at_p3() {
    let pt = point_args(3, 6, 3, A1Case::NotInD, 2);
    let (code, v) = with_point(&["classify"], &pt);
    assert_eq!(code, Some(0));
    let r = &v["results"];
    assert_eq!(r["label"], "A1_d3_notInD");
    assert_eq!(r["d"], 3);
    assert_eq!(r["in_d"], false);
    assert_eq!(v["inputs"]["t_degree"], 3);
}

#[test]
fn classify_accepts_power_notation() {
    let (code, out) = run(&["classify", "--p", "2", "--m", "1", "--t", "gen^0", "gen", "0", "--u", "0", "1"]);
    // (1 : γ : 0) is on the curve only if γ³ = 1, which the generator of F_4 satisfies.
    assert_eq!(code, Some(0), "{out}");
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["results"]["label"], "A3");
}

#[test]
fn oracle_group_matches_closed_form() {
    for (case, order) in [(A1Case::NotInD, 64), (A1Case::InDNotF6, 192)] {
        let pt = point_args(2, 4, 4, case, 3);
        let (code, v) = with_point(&["oracle", "group"], &pt);
        assert_eq!(code, Some(0));
        assert_eq!(v["results"]["order"], order);
        assert_eq!(v["results"]["match"], true);
    }
}

#[test]
fn aut_at_p3() {
    let pt = point_args(3, 6, 6, A1Case::NotInD, 4);
    let (code, v) = with_point(&["aut"], &pt);
    assert_eq!(code, Some(0));
    assert_eq!(v["results"]["order"], 2);
    assert_eq!(v["results"]["type"]["name"], "C2");
}

#[test]
fn witnesses() {
    for (kind, p, degree) in [("ml", "2", 3), ("ml", "3", 4), ("akio", "2", 6)] {
        let (code, out) = run(&["witness", kind, "--p", p]);
        assert_eq!(code, Some(0), "{kind} {p}");
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["results"]["degree"], degree);
        assert!(v["checks"].as_array().unwrap().iter().all(|c| c["match"] == true));
    }
}

#[test]
fn partial_atlas_is_labelled() {
    let (code, out) = run(&["atlas", "--p", "3", "--max-degree", "2"]);
    assert_eq!(code, Some(0));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["results"]["coverage"]["complete"], false);
    assert_eq!(v["results"]["census"]["per_degree"].as_array().unwrap().len(), 2);
}
