mod common;

use common::{assert_golden, qtmlab};

fn golden(name: &str, args: &[&str]) {
    let out = qtmlab(args);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_golden(name, &String::from_utf8(out.stdout).unwrap());
}

#[test]
fn halting_spaces_scan1() {
    golden(
        "halting_scan1_k3.txt",
        &[
            "halting-spaces",
            "--machine",
            "corpus:scan1.qtm",
            "--k",
            "3",
            "--tmax",
            "16",
        ],
    );
}

#[test]
fn coverage_branch1() {
    golden(
        "coverage_branch1_k2.txt",
        &["coverage", "--machine", "corpus:branch1.qtm", "--k", "2"],
    );
}

#[test]
fn decode_identity() {
    golden(
        "decode_identity.txt",
        &[
            "decode",
            "--machine",
            "corpus:identity.qtm",
            "--k",
            "1",
            "--b",
            "1",
        ],
    );
}

#[test]
fn approx_certificate() {
    golden(
        "approx_hadamard.txt",
        &[
            "approx",
            "--machine",
            "corpus:hadamard.qtm",
            "--k",
            "2",
            "--t",
            "1",
            "--delta",
            "1/8",
            "--cert",
            "--samples",
            "20",
            "--seed",
            "3",
        ],
    );
}

#[test]
fn complexity_copy1() {
    golden(
        "complexity_copy1_0101.txt",
        &[
            "complexity",
            "--x",
            "0101",
            "--classical",
            "corpus:rm.tm",
            "--quantum",
            "corpus:copy1.qtm",
            "--dict",
            "basic",
        ],
    );
}

#[test]
fn gap_shipped_pair() {
    golden(
        "gap_hadamard.txt",
        &[
            "gap",
            "--corpus",
            "corpus:corpus4.txt",
            "--classical",
            "corpus:rm.tm",
            "--quantum",
            "corpus:hadamard.qtm",
            "--c-star",
            "1",
            "--lemma3",
            "--prop2",
        ],
    );
}

#[test]
fn gap_identity_pair() {
    golden(
        "gap_identity.txt",
        &[
            "gap",
            "--corpus",
            "corpus:corpus4.txt",
            "--classical",
            "corpus:idprint.tm",
            "--quantum",
            "corpus:identity.qtm",
            "--c-star",
            "0",
            "--decoder-k",
            "1",
        ],
    );
}

#[test]
fn nu_mixture() {
    golden(
        "nu_mix.txt",
        &[
            "nu",
            "--mix",
            "corpus:mix.txt",
            "--steps",
            "100",
            "--check-domination",
        ],
    );
}

#[test]
fn reports_do_not_depend_on_thread_count() {
    let args = ["coverage", "--machine", "corpus:scan1.qtm", "--k", "3"];
    let one = qtmlab(&[&["--threads", "1"][..], &args[..]].concat());
    let many = qtmlab(&[&["--threads", "4"][..], &args[..]].concat());
    assert_eq!(one.stdout, many.stdout);
}
