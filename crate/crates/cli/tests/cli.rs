use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name).display().to_string()
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name).display().to_string()
}

fn treelike(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_treelike")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> (Value, i32) {
    let out = treelike(args);
    let v = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)));
    (v, out.status.code().unwrap())
}

fn check_status(v: &Value, name: &str) -> String {
    v["checks"].as_array().unwrap().iter().find(|c| c["name"] == name).unwrap()["status"].as_str().unwrap().into()
}

#[test]
fn orbits_small_k() {
    let (v, code) = report(&["orbits", "--k", "3"]);
    assert_eq!(code, 0);
    assert_eq!(v["outputs"], serde_json::json!({ "k": 3, "count": 2 }));
}

#[test]
fn orbits_rejects_large_k() {
    let out = treelike(&["orbits", "--k", "9"]);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("exceeds desk scale"));
}

#[test]
fn encode_reports_points() {
    let (v, code) = report(&["encode", "--perm", "2 1"]);
    assert_eq!(code, 0);
    let pts = v["outputs"]["points"].as_array().unwrap();
    assert_eq!(pts.len(), 7);
    let b1 = pts.iter().find(|p| p["name"] == "b1").unwrap();
    assert_eq!(b1["word"], serde_json::json!([["-2/1", 1]]));
    assert_eq!(check_status(&v, "round_trip"), "pass");
}

#[test]
fn decode_file() {
    let (v, code) = report(&["decode", "--in", &data("sigma_312.json")]);
    assert_eq!(code, 0);
    assert_eq!(v["outputs"]["perm"], "3 1 2");
}

#[test]
fn decode_rejects_star() {
    let out = treelike(&["decode", "--in", &data("star.json")]);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("not a sigma-structure"));
}

#[test]
fn embeds_explicit_pair() {
    let (v, code) = report(&["embeds", "--sigma", "1 2", "--tau", "1 3 2"]);
    assert_eq!(code, 0);
    assert_eq!(v["outputs"]["pattern"], true);
    assert_eq!(v["outputs"]["structure_embedding"], true);
    assert_eq!(check_status(&v, "agreement"), "pass");
}

#[test]
fn embeds_seeded_pairs_are_reproducible() {
    let a = treelike(&["embeds", "--pairs", "8", "--seed", "5"]);
    let b = treelike(&["embeds", "--pairs", "8", "--seed", "5"]);
    let c = treelike(&["embeds", "--pairs", "8", "--seed", "6"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn antichain_verifies() {
    let (v, code) = report(&["antichain", "--count", "4", "--verify"]);
    assert_eq!(code, 0);
    assert_eq!(v["outputs"]["rows"].as_array().unwrap().len(), 4);
}

#[test]
fn extend_and_acl() {
    let (v, code) = report(&["extend", "--in", &data("extend.json")]);
    assert_eq!(code, 0, "{v}");
    let (v, code) = report(&["acl", "--in", &data("acl.json"), "--k", "5"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["outputs"]["witnesses"].as_array().unwrap().len(), 5);
}

#[test]
fn tower_subcommands() {
    let star = fixture("tstar.json");
    let (v, code) = report(&["tower", "validate", "--in", &star]);
    assert_eq!(code, 0);
    assert_eq!(v["outputs"]["ok"], true);

    let (v, _) = report(&["tower", "atoms", "--in", &star, "--symbol", "P", "--tuple", "x,y,z,y,x,z"]);
    assert_eq!(v["outputs"]["value"], true);
    let (v, _) = report(&["tower", "atoms", "--in", &star, "--symbol", "P", "--tuple", "y,x,z,x,y,z"]);
    assert_eq!(v["outputs"]["value"], false);

    let (v, _) = report(&["tower", "reduct", "--in", &star, "--subset", "x,y,z", "--language", "L"]);
    let rel = &v["outputs"]["structure"]["relations"]["L"];
    assert_eq!(rel.as_array().unwrap().len(), 4);

    let (v, code) = report(&["tower", "complete", "--in", &star, "--subset", "y,z,w"]);
    assert_eq!(code, 0);
    assert_eq!(v["outputs"]["completion"], serde_json::json!(["w", "x", "y", "z"]));
}

#[test]
fn tower_atoms_rejects_bad_arity() {
    let out = treelike(&["tower", "atoms", "--in", &fixture("tstar.json"), "--symbol", "L", "--tuple", "x,y"]);
    assert_ne!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stderr).contains("arity mismatch"));
}

#[test]
fn nonhomogeneity_witness_found() {
    let (v, code) = report(&["tower", "witness-nonhomog"]);
    assert_eq!(code, 0, "{v}");
    assert_eq!(v["outputs"]["c1"].as_array().unwrap().len(), 5);
}

#[test]
fn indisc_alternation() {
    let (v, code) = report(&["indisc", "--family", "up_sfree", "--n", "12", "--alternation"]);
    assert_eq!(code, 0);
    assert_eq!(check_status(&v, "alternation_stable"), "pass");
    assert!(v["outputs"]["rows"].as_array().unwrap().len() > 30);
}

#[test]
fn triviality_exit_status_follows_checks() {
    let (v, code) = report(&["triviality-witness", "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(check_status(&v, "differing_pair"), "pass");
    let (v, code) = report(&["triviality-witness", "--n", "4", "--cut", "100/1"]);
    assert_eq!(code, 1);
    assert_eq!(check_status(&v, "differing_pair"), "fail");
}

#[test]
fn usage_errors() {
    assert_eq!(treelike(&["orbits"]).status.code(), Some(2));
    assert_eq!(treelike(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(treelike(&["indisc", "--family", "zigzag", "--n", "5"]).status.code(), Some(2));
}

#[test]
fn tsv_layout() {
    let out = treelike(&["antichain", "--count", "3", "--verify", "--tsv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.starts_with("key\tvalue\n"));
    assert!(text.contains("\nindex\tlength\tperm\n"));
    assert!(text.contains("\ncheck\tstatus\tdetail\npairwise_incomparable\tpass\t"));
}

#[test]
fn repeated_runs_are_identical() {
    let args = ["indisc", "--family", "mixed", "--n", "8"];
    assert_eq!(treelike(&args).stdout, treelike(&args).stdout);
}
