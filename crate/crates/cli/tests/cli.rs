//! End-to-end CLI behavior: exit codes, datum/ring mismatch, cache reuse,
//! and custom datum files.

use std::path::Path;
use std::process::Command;

fn starweil() -> Command {
    Command::new(env!("CARGO_BIN_EXE_starweil"))
}

fn json_stdout(out: &std::process::Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn ring_info_reports_sizes() {
    let out = starweil()
        .args(["ring", "info", "--ring", r#"{"kind":"matrix","n":2,"q":3}"#])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = json_stdout(&out);
    assert_eq!(v["size"], 81);
    assert_eq!(v["units"], 48);
    assert_eq!(v["involution_axioms"], "pass");
}

#[test]
fn ring_file_and_inline_agree() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ring.json");
    std::fs::write(&path, r#"{"kind":"truncated_poly","m":3,"q":3}"#).unwrap();
    let from_file = starweil()
        .args(["ring", "info", "--ring", path.to_str().unwrap()])
        .output()
        .unwrap();
    let inline = starweil()
        .args(["ring", "info", "--ring", r#"{"kind":"truncated_poly","m":3,"q":3}"#])
        .output()
        .unwrap();
    assert_eq!(from_file.stdout, inline.stdout);
}

#[test]
fn datum_ring_mismatch_is_a_config_error() {
    let out = starweil()
        .args([
            "weil",
            "verify-data",
            "--ring",
            r#"{"kind":"matrix","n":1,"q":5}"#,
            "--datum",
            "example2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("truncated_poly"), "mismatch message names the expected kind: {err}");
}

#[test]
fn even_m_is_rejected() {
    let out = starweil()
        .args([
            "weil",
            "verify-data",
            "--ring",
            r#"{"kind":"truncated_poly","m":2,"q":3}"#,
            "--datum",
            "example2",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn group_enumerate_uses_cache() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = [
        "group",
        "enumerate",
        "--ring",
        r#"{"kind":"matrix","n":1,"q":5}"#,
        "--cache",
        cache,
    ];
    let first = starweil().args(args).output().unwrap();
    assert!(first.status.success());
    let v1 = json_stdout(&first);
    assert_eq!(v1["order"], 120);
    assert_eq!(v1["cache"], "miss");
    let second = starweil().args(args).output().unwrap();
    let v2 = json_stdout(&second);
    assert_eq!(v2["order"], 120);
    assert_eq!(v2["cache"], "hit");
    assert_eq!(v2["num_classes"], v1["num_classes"]);
    // one .bfs file appeared
    let files: Vec<_> = std::fs::read_dir(dir.path())
        .unwrap()
        .filter_map(|e| e.ok())
        .filter(|e| e.path().extension().is_some_and(|x| x == "bfs"))
        .collect();
    assert_eq!(files.len(), 1);
}

#[test]
fn corrupt_cache_is_rebuilt() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = [
        "group",
        "enumerate",
        "--ring",
        r#"{"kind":"matrix","n":1,"q":3}"#,
        "--cache",
        cache,
    ];
    let first = starweil().args(args).output().unwrap();
    assert_eq!(json_stdout(&first)["cache"], "miss");
    // clobber the cache file
    for e in std::fs::read_dir(dir.path()).unwrap() {
        let p = e.unwrap().path();
        if p.extension().is_some_and(|x| x == "bfs") {
            std::fs::write(&p, b"garbage").unwrap();
        }
    }
    let second = starweil().args(args).output().unwrap();
    let v = json_stdout(&second);
    assert_eq!(v["cache"], "miss", "corrupt file is ignored and rebuilt");
    assert_eq!(v["order"], 24);
}

#[test]
fn env_var_cache_fallback() {
    let dir = tempfile::tempdir().unwrap();
    let out = starweil()
        .env("STARWEIL_CACHE", dir.path())
        .args(["group", "enumerate", "--ring", r#"{"kind":"matrix","n":1,"q":3}"#])
        .output()
        .unwrap();
    assert_eq!(json_stdout(&out)["cache"], "miss");
    let out2 = starweil()
        .env("STARWEIL_CACHE", dir.path())
        .args(["group", "enumerate", "--ring", r#"{"kind":"matrix","n":1,"q":3}"#])
        .output()
        .unwrap();
    assert_eq!(json_stdout(&out2)["cache"], "hit");
}

#[test]
fn decompose_reports_components() {
    let out = starweil()
        .args([
            "decompose",
            "--ring",
            r#"{"kind":"matrix","n":1,"q":5}"#,
            "--datum",
            "example1",
            "--params",
            "m=1",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let v = json_stdout(&out);
    assert_eq!(v["gamma_order"], 2);
    assert_eq!(v["rank_sum"], 5);
    assert_eq!(v["M_size"], 5);
    assert_eq!(v["commutation_exact"], true);
}

#[test]
fn custom_datum_file_round_trip() {
    // dump the built-in example2 tables through the library, then feed the
    // JSON file back through the CLI
    use starweil_core::{FqField, InvolutiveRing, WeilDatum};
    use std::sync::Arc;
    let ring = Arc::new(InvolutiveRing::truncated_poly(1, FqField::new(3, 1).unwrap()).unwrap());
    let d = WeilDatum::truncated_poly(ring, None).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("datum.json");
    std::fs::write(&path, serde_json::to_string(&d.to_json()).unwrap()).unwrap();

    let out = starweil()
        .args([
            "weil",
            "verify-data",
            "--ring",
            r#"{"kind":"truncated_poly","m":1,"q":3}"#,
            "--datum",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_stdout(&out);
    assert_eq!(v["datum"]["verdict"], "pass");
    // custom data carry no quadratic structure: gauss stage is skipped
    assert_eq!(v["gauss"]["verdict"], "skipped");
}

#[test]
fn failing_datum_reports_and_exits_one() {
    // a custom datum with a broken c flows through the verifier, which
    // reports the failing axioms and exits 1
    use starweil_core::{FqField, InvolutiveRing, WeilDatum};
    use std::sync::Arc;
    let ring = Arc::new(InvolutiveRing::truncated_poly(1, FqField::new(3, 1).unwrap()).unwrap());
    let d = WeilDatum::truncated_poly(ring, None).unwrap();
    let mut json = d.to_json();
    json["c"] = serde_json::json!(["1", "0"]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, serde_json::to_string(&json).unwrap()).unwrap();
    let out = starweil()
        .args([
            "weil",
            "verify-data",
            "--ring",
            r#"{"kind":"truncated_poly","m":1,"q":3}"#,
            "--datum",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let v = json_stdout(&out);
    assert_eq!(v["datum"]["verdict"], "fail");
    assert_eq!(v["datum"]["axioms"]["c_squared_normalization"]["verdict"], "fail");

    // the strict consumers refuse the same file up front
    let out = starweil()
        .args([
            "weil",
            "build",
            "--ring",
            r#"{"kind":"truncated_poly","m":1,"q":3}"#,
            "--datum",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn failing_run_still_writes_files_and_exits_nonzero() {
    use starweil_core::{FqField, InvolutiveRing, WeilDatum};
    use std::sync::Arc;
    let ring = Arc::new(InvolutiveRing::truncated_poly(1, FqField::new(3, 1).unwrap()).unwrap());
    let d = WeilDatum::truncated_poly(ring, None).unwrap();
    let mut json = d.to_json();
    json["c"] = serde_json::json!(["1", "0"]);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, serde_json::to_string(&json).unwrap()).unwrap();
    let out_dir = dir.path().join("out");
    let out = starweil()
        .args([
            "run",
            "--ring",
            r#"{"kind":"truncated_poly","m":1,"q":3}"#,
            "--datum",
            path.to_str().unwrap(),
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["report.json", "timings.json", "presentation.json"] {
        assert!(out_dir.join(f).exists(), "missing {f}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["summary"]["all_passed"], false);
    assert_eq!(report["stages"]["07_operators"]["verdict"], "skipped");
}

#[test]
fn run_writes_all_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("out");
    let out = starweil()
        .args([
            "run",
            "--ring",
            r#"{"kind":"matrix","n":1,"q":3}"#,
            "--datum",
            "example1",
            "--params",
            "m=1",
            "--seed",
            "5",
            "--out",
            out_dir.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    for f in ["report.json", "timings.json", "presentation.json", "decomposition.json", "character.csv"] {
        assert!(Path::new(&out_dir).join(f).exists(), "missing {f}");
    }
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["summary"]["all_passed"], true);
    // timings stay out of the deterministic report
    assert!(report.get("timings").is_none());
    assert!(report["stages"].get("08_homomorphism").is_some());
}
