//! Desk-scale laboratory for quantum Turing machines: unitary evolution on
//! looped tapes, halting subspaces, elementary approximation channels,
//! coverage decoding and toy algorithmic complexity.

pub mod error;
pub mod exact;
pub mod opalg;
pub mod tolerances;

pub use error::{Error, Result};
pub mod algprob;
pub mod channel;
pub mod cli;
pub mod complexity;
pub mod corpus;
pub mod decoder;
pub mod halting;
pub mod machine;
