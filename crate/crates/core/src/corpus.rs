//! Machines and data files shipped with the crate.

use crate::error::{Error, Result};
use crate::machine::{parse_machine, QTMDef};

pub const IDENTITY: &str = include_str!("../corpus/identity.qtm");
pub const COPY1: &str = include_str!("../corpus/copy1.qtm");
pub const SCAN1: &str = include_str!("../corpus/scan1.qtm");
pub const BRANCH1: &str = include_str!("../corpus/branch1.qtm");
pub const HADAMARD: &str = include_str!("../corpus/hadamard.qtm");
pub const ROT35: &str = include_str!("../corpus/rot35.qtm");
pub const LOOP: &str = include_str!("../corpus/loop.qtm");

pub const RM: &str = include_str!("../corpus/rm.tm");
pub const PREFIX: &str = include_str!("../corpus/prefix.tm");
pub const IDPRINT: &str = include_str!("../corpus/idprint.tm");
pub const CORPUS4: &str = include_str!("../corpus/corpus4.txt");
pub const MIX: &str = include_str!("../corpus/mix.txt");

/// Every shipped machine document, by name.
pub const MACHINES: [(&str, &str); 7] = [
    ("identity", IDENTITY),
    ("copy1", COPY1),
    ("scan1", SCAN1),
    ("branch1", BRANCH1),
    ("hadamard", HADAMARD),
    ("rot35", ROT35),
    ("loop", LOOP),
];

pub fn machine(name: &str) -> Result<QTMDef> {
    let text = MACHINES
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, t)| *t)
        .ok_or_else(|| Error::InvalidArgument(format!("no shipped machine named `{name}`")))?;
    parse_machine(text)
}

pub fn all_machines() -> Vec<QTMDef> {
    MACHINES
        .iter()
        .map(|(_, t)| parse_machine(t).expect("shipped machines parse"))
        .collect()
}
