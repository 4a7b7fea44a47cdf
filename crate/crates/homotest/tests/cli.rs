//! End-to-end checks of the command-line interface: exit codes, the
//! stdout/stderr contract, and output formats.

use std::process::Command;

fn homotest(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_homotest")).args(args).output().unwrap()
}

#[test]
fn sample_writes_csv_to_stdout() {
    let out = homotest(&["sample", "--preset", "circle", "-n", "5", "--seed", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.lines().all(|l| l.split(',').count() == 2));
}

#[test]
fn betti_on_sampled_circle() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cloud.csv");
    let out = homotest(&[
        "sample", "--preset", "disk", "-n", "300", "--seed", "4",
        "-o", csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = homotest(&[
        "betti", "-i", csv.to_str().unwrap(), "--epsilon", "0.25", "--scale", "per_point_norm",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("(1, 1)"), "expected circle Betti numbers, got: {text}");
    let json_line = text.lines().find(|l| l.starts_with('{')).expect("JSON line");
    let v: serde_json::Value = serde_json::from_str(json_line).unwrap();
    assert_eq!(v["betti"], serde_json::json!([1, 1]));
    assert_eq!(v["epsilon"], serde_json::json!(0.25));
}

#[test]
fn test_one_reports_json_and_exit_zero() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("cloud.csv");
    assert!(homotest(&[
        "sample", "--preset", "circle", "-n", "100", "--seed", "2", "-o", csv.to_str().unwrap(),
    ])
    .status
    .success());
    let out = homotest(&[
        "test-one", "-i", csv.to_str().unwrap(), "--hyp", "1,1", "--null-preset", "circle",
        "--r", "20", "--seed", "3",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value =
        serde_json::from_str(String::from_utf8(out.stdout).unwrap().trim()).unwrap();
    for key in ["statistic", "critical_value", "reject", "alpha", "regime", "n"] {
        assert!(v.get(key).is_some(), "missing key {key}");
    }
}

#[test]
fn errors_go_to_stderr_with_nonzero_exit() {
    let out = homotest(&["betti", "-i", "/nonexistent/cloud.csv", "--epsilon", "0.2"]);
    assert!(!out.status.success());
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());

    let out = homotest(&["sample", "--preset", "not-a-preset", "-n", "5"]);
    assert!(!out.status.success());

    // --epsilon and --regime are mutually exclusive
    let out = homotest(&["betti", "-i", "x.csv", "--epsilon", "0.2", "--regime", "critical"]);
    assert!(!out.status.success());
}

#[test]
fn power_command_writes_schema_csv() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        serde_json::json!({
            "scenario": "disk_vs_square",
            "mode": "two_sample",
            "null": {"kind": "uniform_disk"},
            "alt": {"kind": "uniform_square"},
            "regime": "supercritical",
            "alpha": 0.05,
            "r": 5,
            "n_list": [20],
            "seed": 0,
            "scaling": "per_point_norm"
        })
        .to_string(),
    )
    .unwrap();
    let out_csv = dir.path().join("power.csv");
    let plot = dir.path().join("power.svg");
    let out = homotest(&[
        "power", "-c", config.to_str().unwrap(), "-o", out_csv.to_str().unwrap(),
        "--plot", plot.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&out_csv).unwrap();
    assert_eq!(text.lines().next().unwrap(), "scenario,method,regime,n,r,alpha,power,seed");
    assert_eq!(text.lines().count(), 2);
    assert!(std::fs::read_to_string(&plot).unwrap().starts_with("<svg"));
}

#[test]
fn invalid_config_lists_all_problems() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(
        &config,
        serde_json::json!({
            "scenario": "bad",
            "mode": "two_sample",
            "null": {"kind": "uniform_disk"},
            "regime": "critical",
            "alpha": 2.0,
            "r": 0,
            "n_list": [],
            "seed": 0
        })
        .to_string(),
    )
    .unwrap();
    let out = homotest(&["power", "-c", config.to_str().unwrap()]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    for needle in ["alpha", "r:", "n_list"] {
        assert!(err.contains(needle), "stderr missing {needle}: {err}");
    }
}
