use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn symbill(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_symbill")).args(args).output().unwrap()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

const TRIANGLE: &str = r#"{"vertices": [[0, 0], [1, 0], [0, 1]]}"#;

#[test]
fn certify_quad_exits_zero_with_its_periods() {
    let out = symbill(&["certify", "quad"]);
    assert_eq!(out.status.code(), Some(0));
    let cert = stdout_json(&out);
    assert_eq!(cert["verdict"]["kind"], "fully_periodic");
    assert!(String::from_utf8_lossy(&out.stderr).contains("periods 20, 36"));
}

#[test]
fn certify_reports_exhausted_budget() {
    let out = symbill(&["certify", "quad", "--max-tiles", "3"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn triangle_midpoints_have_period_three() {
    let out = symbill(&["orbit", TRIANGLE, "--phase", "0,1/2,1,1/2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["status"]["period"], 3);
    let capped = symbill(&["orbit", "kite", "--phase", "0,1/3,2,1/7", "--max", "5"]);
    assert_eq!(capped.status.code(), Some(3));
}

#[test]
fn step_back_inverts_step() {
    let fwd = stdout_json(&symbill(&["step", "quad", "--phase", "0,1/3,2,1/5"]));
    let next = &fwd["next"];
    let phase = format!("{},{},{},{}", next["tail_side"], next["tail"].as_str().unwrap(), next["head_side"], next["head"].as_str().unwrap());
    let back = stdout_json(&symbill(&["step", "quad", "--phase", &phase, "--back"]));
    assert_eq!(back["next"], serde_json::json!({ "tail_side": 0, "tail": "1/3", "head_side": 2, "head": "1/5" }));
}

#[test]
fn portrait_of_tall_penthouse_has_three_periods() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("p.json");
    let out = symbill(&["portrait", "penthouse:a=2,b=3/5", "--res", "64x64", "--out", json.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "periods: 12, 20, 28");
    let p: Value = serde_json::from_str(&fs::read_to_string(&json).unwrap()).unwrap();
    for k in ["12", "20", "28"] {
        assert!(p["legend"].get(k).is_some());
    }

    let png = dir.path().join("p.png");
    let a = symbill(&["portrait", "quad", "--res", "32", "--out", png.to_str().unwrap(), "--jobs", "1"]);
    let first = fs::read(&png).unwrap();
    let b = symbill(&["portrait", "quad", "--res", "32", "--out", png.to_str().unwrap(), "--jobs", "3"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(first, fs::read(&png).unwrap());
    assert!(first.starts_with(b"\x89PNG"));

    let bad = symbill(&["portrait", "quad", "--res", "8", "--out", dir.path().join("p.gif").to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(1));
}

#[test]
fn certificates_round_trip_through_check_cert() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let out = symbill(&["certify", "penthouse:a=2,b=3/5", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("periods 12, 20, 28"));
    let ok = symbill(&["check-cert", path.to_str().unwrap()]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(stdout_json(&ok)["ok"], true);

    let mut cert: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    cert["tile_orbits"][0]["length"] = (cert["tile_orbits"][0]["length"].as_u64().unwrap() + 1).into();
    fs::write(&path, cert.to_string()).unwrap();
    assert_eq!(symbill(&["check-cert", path.to_str().unwrap()]).status.code(), Some(2));
}

#[test]
fn validate_reports_reversal_and_rejects_nonconvex() {
    let out = symbill(&["validate", TRIANGLE]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout_json(&out)["report"]["reversed"], false);
    let cw = symbill(&["validate", r#"{"vertices": [[0, 0], [0, 1], [1, 0]]}"#]);
    assert_eq!(stdout_json(&cw)["report"]["reversed"], true);
    let bad = symbill(&["validate", r#"{"vertices": [[0, 0], [2, 0], [1, "1/4"], [1, 2]]}"#]);
    assert_eq!(bad.status.code(), Some(2));
    assert_eq!(stdout_json(&bad)["valid"], false);
}

#[test]
fn diffbody_prints_both_sides() {
    let v = stdout_json(&symbill(&["diffbody", "quad"]));
    assert_eq!(v["area"], "19");
    assert_eq!(v["phase_area"], "19");
    assert_eq!(v["twice_phase_area"], "38");
    assert_eq!(v["difference_body"]["vertices"].as_array().unwrap().len(), 8);
}

#[test]
fn perturb_is_deterministic() {
    let a = symbill(&["perturb", "quad", "--eps", "1/100", "--seed", "9"]);
    let b = symbill(&["perturb", "quad", "--eps", "1/100", "--seed", "9"]);
    assert_eq!(a.stdout, b.stdout);
    let zero = stdout_json(&symbill(&["perturb", "quad", "--eps", "0"]));
    assert_eq!(zero["vertices"], stdout_json(&symbill(&["validate", "quad"]))["polygon"]["vertices"]);
}

#[test]
fn scan_writes_jsonl_independent_of_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |jobs: &str, name: &str| {
        let path = dir.path().join(name);
        let out = symbill(&["scan", "hexhouse", "--box", "w=4,h=2", "--jobs", jobs, "--out", path.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        (out.stdout, fs::read(path).unwrap())
    };
    let (table, one) = run("1", "a.jsonl");
    let (_, four) = run("4", "b.jsonl");
    assert_eq!(one, four);
    assert_eq!(String::from_utf8(one).unwrap().lines().count(), 8);
    assert!(String::from_utf8(table).unwrap().starts_with("hexhouse: 8 members, 8 fully periodic, 8 conforming"));
}

#[test]
fn penthouse_scan_prints_bifurcation() {
    let out = symbill(&["scan", "penthouse", "--box", "a=2|1|2/3,b=3/5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("modulus 1 -> 2"), "{text}");
    assert!(text.contains("persisting {28}"), "{text}");
}

#[test]
fn search_kite_is_seeded() {
    let args = ["search-kite", "--max-period", "30", "--grid", "8", "--random", "10", "--seed", "3"];
    let a = symbill(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, symbill(&args).stdout);
    assert_eq!(stdout_json(&a)["samples"], 8 * 8 - 16 + 10);
}

#[test]
fn verify_paper_subset() {
    let out = symbill(&["verify-paper", "--only", "quad,penthouse"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().next().unwrap().starts_with("PASS quad theorem"));
    assert!(text.contains("2 passed, 0 known failures, 0 unexpected failures"));
    assert_eq!(symbill(&["verify-paper", "--only", "nope"]).status.code(), Some(1));
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(symbill(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(symbill(&["orbit", "quad"]).status.code(), Some(1));
    assert_eq!(symbill(&["orbit", "quad", "--phase", "0,1/2"]).status.code(), Some(1));
    assert_eq!(symbill(&["certify", "penthouse:a=-1,b=1/2"]).status.code(), Some(1));
    let help = symbill(&["scan", "--help"]);
    assert_eq!(help.status.code(), Some(0));
    for flag in ["--box", "--out", "--jobs", "--max-tiles", "--max-steps"] {
        assert!(String::from_utf8_lossy(&help.stdout).contains(flag), "{flag}");
    }
}
