mod common;

use std::process::Command;

use common::qtmlab;

fn write_tmp(name: &str, text: &str) -> String {
    let dir = std::env::temp_dir().join(format!("qtmlab-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

fn broken_machine() -> String {
    let text = qtmlab::corpus::IDENTITY.replace("rule s 0 -> f 0 R 1 0", "rule s 0 -> f 0 R 1/2 0");
    write_tmp("broken.qtm", &text)
}

#[test]
fn validate_shipped_machine() {
    let out = qtmlab(&["validate", "--machine", "corpus:identity.qtm"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("CHECK unitarity:identity PASS"));
}

#[test]
fn validate_from_disk() {
    let p = write_tmp("rot.qtm", qtmlab::corpus::ROT35);
    let out = qtmlab(&["validate", "--machine", &p, "--backend", "exact"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn parse_errors_exit_2() {
    let p = write_tmp("zero.qtm", &qtmlab::corpus::IDENTITY.replace("R 1 0", "R 1/0 0"));
    assert_eq!(qtmlab(&["validate", "--machine", &p]).status.code(), Some(2));
    let out = qtmlab(&[
        "validate",
        "--machine",
        "corpus:hadamard.qtm",
        "--backend",
        "exact",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(qtmlab(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn validation_failures_exit_3() {
    let broken = broken_machine();
    let out = qtmlab(&["validate", "--machine", &broken]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL"));
    let out = qtmlab(&["bundle", "--machine", &broken]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stage `validate`"));
    let out = qtmlab(&[
        "decode",
        "--machine",
        "corpus:identity.qtm",
        "--k",
        "1",
        "--b",
        "99",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn bound_violations_exit_4() {
    let out = qtmlab(&[
        "gap",
        "--corpus",
        "corpus:corpus4.txt",
        "--classical",
        "corpus:rm.tm",
        "--quantum",
        "corpus:hadamard.qtm",
        "--c-star",
        "0",
        "--decoder-k",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stdout).contains("CHECK max_gap FAIL 1 0"));
}

#[test]
fn io_errors_exit_1() {
    let out = qtmlab(&["validate", "--machine", "/nonexistent/machine.qtm"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn conflicting_flags_are_rejected() {
    let out = qtmlab(&[
        "approx",
        "--machine",
        "corpus:identity.qtm",
        "--t",
        "1",
        "--delta",
        "1/4",
        "--j",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_count_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_qtmlab"))
        .args([
            "decode",
            "--machine",
            "corpus:identity.qtm",
            "--k",
            "1",
            "--b",
            "2",
        ])
        .env("QTM_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout), "1\n");
}

#[test]
fn evolve_reports_output() {
    let out = qtmlab(&[
        "evolve",
        "--machine",
        "corpus:copy1.qtm",
        "--input",
        "01",
        "--t",
        "5",
    ]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0));
    assert!(text.contains("halting time 5"));
    assert!(text.contains("output 011 weight 1.000000000000"));
    let op = write_tmp("half.op", "op 2 exact\nentry 0 0 1/2 0\nentry 1 1 1/2 0\n");
    let out = qtmlab(&[
        "evolve",
        "--machine",
        "corpus:identity.qtm",
        "--state",
        &op,
        "--t",
        "1",
    ]);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("output 0 weight 0.5") && text.contains("output 1 weight 0.5"));
}
