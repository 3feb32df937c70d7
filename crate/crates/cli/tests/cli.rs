//! End-to-end checks of the command-line contract: exit codes, JSON shape,
//! and hypothesis gating.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_spectral-colorings"))
}

#[test]
fn thm8_on_star_exits_zero_with_small_residual() {
    let out = bin()
        .args([
            "verify",
            "--check",
            "thm8",
            "--gen",
            "star:3",
            "--q",
            "7",
            "--no-timestamp",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["schema"], "spectral-colorings/1");
    let residual = report["results"][0]["residual"].as_f64().unwrap();
    assert!(residual <= 1e-8, "residual {residual}");
    assert_eq!(report["summary"], "PASS 1/1");
}

#[test]
fn malformed_instance_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("broken.json");
    std::fs::write(&path, "{ not json").unwrap();
    let out = bin()
        .args(["oracle", "count", "--input"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn hypothesis_gate_rejects_triangles() {
    let out = bin()
        .args([
            "verify", "--check", "lemma18", "--gen", "cycle:3", "--q", "9",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("hypothesis violated: triangle-free"),
        "stderr: {stderr}"
    );
}

#[test]
fn failed_check_exits_one() {
    // an absurd tolerance turns the (passing) identity into a failure
    let out = bin()
        .args([
            "verify",
            "--check",
            "thm8",
            "--gen",
            "star:3",
            "--q",
            "7",
            "--tol",
            "1e-30",
            "--no-timestamp",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("FAIL"), "stderr: {stderr}");
}

#[test]
fn gen_output_reloads() {
    let dir = tempfile::tempdir().unwrap();
    let report_path = dir.path().join("report.json");
    let out = bin()
        .args([
            "gen",
            "--gen",
            "grid:2x3",
            "--q",
            "5",
            "--random-lists",
            "--seed",
            "4",
            "--no-timestamp",
            "--out",
        ])
        .arg(&report_path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report_path).unwrap()).unwrap();
    // the results field is the instance format itself
    let inst_path = dir.path().join("instance.json");
    std::fs::write(&inst_path, report["results"].to_string()).unwrap();
    let out = bin()
        .args(["oracle", "count", "--no-timestamp", "--input"])
        .arg(&inst_path)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let total: u128 = report["results"]["total"]
        .as_str()
        .unwrap()
        .parse()
        .unwrap();
    assert!(total > 0);
}

#[test]
fn edge_list_input_with_q() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("graph.txt");
    std::fs::write(&path, "0 1\n1 2\n2 3\n3 0\n").unwrap();
    let out = bin()
        .args(["oracle", "count", "--q", "3", "--no-timestamp", "--input"])
        .arg(&path)
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    // 3-colorings of a 4-cycle: (3-1)^4 + (3-1) = 18
    assert_eq!(report["results"]["total"], "18");
    // edge list without --q is a usage error
    let out = bin()
        .args(["oracle", "count", "--input"])
        .arg(&path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_instance_is_usage_error() {
    let out = bin().args(["oracle", "count"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_emits_expansion_table() {
    let out = bin()
        .args([
            "spectral",
            "--check",
            "sweep",
            "--gen",
            "star:3",
            "--q",
            "7",
            "--epsilon",
            "0.1",
            "--budget",
            "100000",
            "--no-timestamp",
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let table = report["results"]["local_expansion_table"].as_array().unwrap();
    assert_eq!(table.len(), 3);
    for row in table {
        assert!(row["exhaustive"].as_bool().unwrap());
        // star(3) with q = 7 is in the region: the ceiling must be present
        // and dominate the observed value
        let bound = row["bound"].as_f64().unwrap();
        assert!(row["worst_lambda2"].as_f64().unwrap() <= bound + 1e-9);
    }
    assert!(report["results"]["mixing_bound"].as_f64().unwrap() > 0.0);
}

#[test]
fn couple_reports_coalescence() {
    let out = bin()
        .args([
            "couple",
            "--gen",
            "cycle:6",
            "--q",
            "6",
            "--max-steps",
            "1000000",
            "--seed",
            "5",
            "--no-timestamp",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["results"]["coalesced_at"].as_u64().unwrap() > 0);
}
