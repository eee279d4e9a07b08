#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

pub fn qtmlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qtmlab"))
        .args(args)
        .output()
        .expect("binary runs")
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

/// Compares against a golden file; `QTMLAB_BLESS=1` rewrites it.
pub fn assert_golden(name: &str, actual: &str) {
    let path = golden_path(name);
    if std::env::var_os("QTMLAB_BLESS").is_some() {
        std::fs::write(&path, actual).expect("write golden");
        return;
    }
    let expected = std::fs::read_to_string(&path)
        .unwrap_or_else(|_| panic!("missing golden {name}; run with QTMLAB_BLESS=1"));
    assert!(expected == actual, "{name} differs from golden:\n{actual}");
}

/// `key value` pairs from the frozen constants file.
pub fn constant(key: &str) -> String {
    let text = std::fs::read_to_string(golden_path("constants.txt")).expect("constants");
    text.lines()
        .filter_map(|l| l.split_once(' '))
        .find(|(k, _)| *k == key)
        .map(|(_, v)| v.trim().to_string())
        .unwrap_or_else(|| panic!("no constant {key}"))
}
