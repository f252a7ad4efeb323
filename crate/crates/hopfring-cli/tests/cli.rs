use std::process::{Command, Output};

use hopfring::dyer_lashof::DlElement;
use hopfring::verify::Report;
use serde_json::Value;

fn hopfring(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hopfring")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn adem_reduce_examples() {
    let o = hopfring(&["adem-reduce", "Q5 Q1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("Q5 Q1 = -Q4 Q2"));

    // admissible but of negative excess: shown as is, excess reported
    let o = hopfring(&["adem-reduce", "Q1 Q5"]);
    assert!(stdout(&o).starts_with("Q1 Q5 = Q1 Q5"));
    assert!(stdout(&o).contains("excess -18"));
    let o = hopfring(&["adem-reduce", "--drop-negative", "Q1 Q5"]);
    assert!(stdout(&o).starts_with("Q1 Q5 = 0"));

    assert!(stdout(&hopfring(&["adem-reduce", "Q1"])).starts_with("Q1 = Q1"));
}

#[test]
fn parse_errors_carry_a_position() {
    let o = hopfring(&["adem-reduce", "Q5 bX2"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("position 3"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(hopfring(&["-p", "2", "adem-reduce", "Q1"]).status.code(), Some(2));
    assert_eq!(hopfring(&["verify", "--suite", "nope"]).status.code(), Some(2));
    assert_eq!(hopfring(&["basis", "--kind", "R", "-n", "0"]).status.code(), Some(2));
    assert_eq!(hopfring(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn adem_json_round_trips() {
    let o = hopfring(&["--format", "json", "adem-reduce", "bQ4 Q2"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let nf = DlElement::from_json(&v["normal_form"]).unwrap();
    assert_eq!(nf.to_json(), v["normal_form"]);
    assert_eq!(nf.to_string(), v["display"].as_str().unwrap());
    assert_eq!(v["run"]["command"], "adem-reduce");
    assert_eq!(v["run"]["prime"], 3);
}

#[test]
fn cache_dir_is_used() {
    let dir = std::env::temp_dir().join(format!("hopfring-cache-{}", std::process::id()));
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_hopfring"))
            .args(["adem-reduce", "Q7 Q2"])
            .env("HOPFRING_CACHE_DIR", &dir)
            .output()
            .unwrap()
    };
    let first = run();
    assert_eq!(std::fs::read_dir(&dir).unwrap().count(), 1);
    let second = run();
    assert_eq!(first.stdout, second.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn basis_tables() {
    // rank one R: only degrees 2i(p-1) and 2i(p-1)-1
    let o = hopfring(&["--format", "json", "basis", "--kind", "R", "-n", "1", "-d", "16"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    for row in v["rows"].as_array().unwrap() {
        let d = row["d"].as_i64().unwrap();
        let expect = if d % 4 == 0 || d % 4 == 3 { 1 } else { 0 };
        assert_eq!(row["count"], expect, "degree {d}");
    }
    let o = hopfring(&["--format", "csv", "basis", "--kind", "cokernel", "-n", "1", "-d", "30"]);
    let text = stdout(&o);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,k,d,count,strings"));
    assert!(lines.all(|l| l.split(',').nth(3) == Some("0")));
}

#[test]
fn b_and_r_counts_agree() {
    let count = |kind: &str| -> Vec<i64> {
        let o = hopfring(&["--format", "json", "basis", "--kind", kind, "-n", "2", "-c", "1", "-d", "30"]);
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v["rows"].as_array().unwrap().iter().map(|r| r["count"].as_i64().unwrap()).collect()
    };
    assert_eq!(count("B"), count("R"));
}

#[test]
fn verify_report_round_trips() {
    let out = std::env::temp_dir().join(format!("hopfring-report-{}.json", std::process::id()));
    let o = hopfring(&[
        "--format", "json", "--out", out.to_str().unwrap(), "--jobs", "2",
        "verify", "--suite", "confluence", "--samples", "40", "--seed", "7",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    std::fs::remove_file(&out).unwrap();
    let reports: Vec<Report> = serde_json::from_value(v["reports"].clone()).unwrap();
    assert_eq!(reports.len(), 1);
    assert_eq!(reports[0].checks.len(), 40);
    assert_eq!(reports[0].config.seed, 7);
    assert_eq!(v["run"]["config"]["samples"], 40);
    assert_eq!(serde_json::to_value(&reports).unwrap(), v["reports"]);
}

#[test]
fn overflow_exits_3() {
    let o = hopfring(&["verify", "--suite", "vanishing", "--budget", "5"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("Overflow"));
}

#[test]
fn list_suites() {
    let o = hopfring(&["verify", "--list"]);
    let names: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(names.len(), 13);
    assert!(names.contains(&"e-relations".to_string()));
}
