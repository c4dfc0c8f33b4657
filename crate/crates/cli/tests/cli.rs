//! End-to-end tests of the command-line surface: worked examples, exit
//! codes, output determinism, and the CSV grid round trip.

use std::path::Path;
use std::process::{Command, Output};

fn mcint(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcint"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn psi_worked_example() {
    let out = mcint(&["psi", "--q", "3", "--x", "1/4"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), r#"{"value":"1/3"}"#);

    let out = mcint(&["psi", "--q", "5", "--x", "1/5"]);
    assert_eq!(stdout(&out).trim(), r#"{"value":"1/3"}"#);
}

#[test]
fn build_eval_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m3.json");
    let out = mcint(&[
        "build",
        "m3",
        "--alpha",
        "3",
        "--depth",
        "8",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let meta = std::fs::read_to_string(&path).unwrap();
    assert!(meta.contains(r#""construction":"m3""#));

    let out = mcint(&["eval", "--fn", path.to_str().unwrap(), "--x", "4/9"]);
    assert_eq!(stdout(&out).trim(), r#"{"value":"1/8"}"#);
    let out = mcint(&[
        "eval",
        "--fn",
        path.to_str().unwrap(),
        "--x",
        "1/3",
        "--which",
        "phi",
    ]);
    assert_eq!(stdout(&out).trim(), r#"{"value":"5/6"}"#);
    let out = mcint(&[
        "eval",
        "--fn",
        path.to_str().unwrap(),
        "--x",
        "4/9",
        "--which",
        "f",
    ]);
    assert_eq!(stdout(&out).trim(), r#"{"value":"0"}"#);
}

#[test]
fn staircase_enclosure_through_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m4.json");
    mcint(&[
        "build",
        "m4",
        "--depth",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    // [23/108, 23/108 + 1/270], with the upper endpoint reduced to 13/60
    let out = mcint(&["eval", "--fn", path.to_str().unwrap(), "--x", "1/2"]);
    assert_eq!(
        stdout(&out).trim(),
        r#"{"enclosure":{"hi":"13/60","lo":"23/108"}}"#
    );
}

fn build_m3(dir: &Path) -> String {
    let path = dir.join("m3.json");
    mcint(&[
        "build",
        "m3",
        "--alpha",
        "3",
        "--depth",
        "8",
        "--out",
        path.to_str().unwrap(),
    ]);
    path.to_str().unwrap().to_string()
}

#[test]
fn verify_pass_fail_and_budget_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let m3 = build_m3(dir.path());

    // proof-delta sweep passes: exit 0
    let out = mcint(&[
        "verify", "mc", "--fn", &m3, "--beta", "4", "--eps", "1/2", "--points",
        "nodes:3:k<=2", "--delta-rule", "m3-proof-delta",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains(r#""verdict":"pass""#));

    // a fixed window wide enough to see a bump with a tiny eps fails: exit 1
    let out = mcint(&[
        "verify", "mc", "--fn", &m3, "--beta", "4", "--eps", "1/1000000", "--points",
        "list:1/3", "--delta-rule", "fixed:1/10",
    ]);
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    assert!(stdout(&out).contains(r#""verdict":"fail""#));

    // a probe over a region missing the set exhausts its cap: exit 3
    let out = mcint(&[
        "probe",
        "--source",
        "m3-weights",
        "--region",
        "11/27,13/27",
        "--target",
        "1",
        "--cap",
        "6",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.contains(r#""kind":"budget""#), "{err}");

    // malformed rationals are usage errors: exit 2
    let out = mcint(&["psi", "--q", "3", "--x", "1/0"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8(out.stderr.clone()).unwrap();
    assert!(err.contains(r#""kind":"parse""#), "{err}");
}

#[test]
fn verify_other_checks_run() {
    let dir = tempfile::tempdir().unwrap();
    let m3 = build_m3(dir.path());

    let out = mcint(&[
        "verify", "sm", "--fn", &m3, "--alpha", "3", "--points", "gaps:3:k<=3",
        "--h", "1/729,1/6561",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).contains(r#""monotone":"pass""#));

    let out = mcint(&[
        "verify", "deriv", "--fn", &m3, "--x", "4/9", "--h", "1/4096,1/8192",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));

    let out = mcint(&[
        "verify", "perron", "--fn", &m3, "--eps", "1/2", "--points", "nodes:3:k<=5",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}

#[test]
fn probe_and_osc_sum_worked_values() {
    let out = mcint(&[
        "probe", "--source", "m3-weights", "--region", "0,1", "--target", "3/8",
    ]);
    assert_eq!(stdout(&out).trim(), r#"{"depth":3}"#);
    let out = mcint(&[
        "probe", "--source", "m3-weights", "--region", "0,1", "--target", "1",
    ]);
    assert_eq!(stdout(&out).trim(), r#"{"depth":47}"#);

    let dir = tempfile::tempdir().unwrap();
    let m4 = dir.path().join("m4.json");
    mcint(&["build", "m4", "--depth", "6", "--out", m4.to_str().unwrap()]);
    let out = mcint(&[
        "osc-sum",
        "--fn",
        m4.to_str().unwrap(),
        "--gaps",
        "gaps:5:k<=3",
        "--plateau-aware",
    ]);
    assert_eq!(stdout(&out).trim(), r#"{"gaps":26,"sum":"13/18"}"#);
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let m3 = build_m3(dir.path());
    let args = [
        "verify", "mc", "--fn", m3.as_str(), "--beta", "4", "--eps", "1/2,1/4",
        "--points", "nodes:3:k<=3", "--delta-rule", "m3-proof-delta",
    ];
    let first = mcint(&args);
    let second = mcint(&args);
    assert_eq!(first.stdout, second.stdout);
    assert_eq!(first.status.code(), second.status.code());
}

#[test]
fn csv_grid_dump_round_trips_into_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let m3 = build_m3(dir.path());
    let csv_path = dir.path().join("grid.csv");
    let out = mcint(&[
        "sweep",
        "--fn",
        &m3,
        "--points",
        "nodes:3:k<=2",
        "--format",
        "csv",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("x,F,f,phi,ratio"));
    let xs: Vec<&str> = lines
        .filter(|l| !l.is_empty())
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert!(!xs.is_empty());
    let list_spec = format!("list:{}", xs.join(","));

    let from_spec = mcint(&[
        "verify", "mc", "--fn", &m3, "--beta", "4", "--eps", "1/2", "--points",
        "nodes:3:k<=2", "--delta-rule", "m3-proof-delta",
    ]);
    let from_csv = mcint(&[
        "verify", "mc", "--fn", &m3, "--beta", "4", "--eps", "1/2", "--points",
        &list_spec, "--delta-rule", "m3-proof-delta",
    ]);
    assert_eq!(from_spec.stdout, from_csv.stdout);
}

#[test]
fn m1_build_and_eval() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m1.json");
    let out = mcint(&[
        "build",
        "m1",
        "--depth",
        "3",
        "--interval",
        "0,1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    // the aggregate integral reaches total mass 7/8 at the right end
    let out = mcint(&["eval", "--fn", path.to_str().unwrap(), "--x", "1"]);
    assert_eq!(stdout(&out).trim(), r#"{"value":"7/8"}"#);
}
