//! Toy plain and prefix complexity, BvL complexity search and the gap
//! experiment between them.

pub mod bvl;
pub mod gap;
pub mod lemma3;
pub mod plain;
pub mod prop2;
pub mod tm;

pub use bvl::{classical_target, BvlSearch, Dictionary, OutputState, Program};
pub use gap::{
    complexity_report, decoder_cross_check, mueller_gap, parse_corpus, ComplexityReport, DecoderCheck,
    DecoderEntry, GapReport,
};
pub use lemma3::{lemma3_chain, third, ChainReport, ChainRow, LemmaNu};
pub use plain::{
    nat_to_bits, plain_complexity, plain_complexity_strict, prefix_complexity, toy_k, toy_k_nat, toy_m,
    toy_m_nat, Complexity,
};
pub use prop2::{c_prime_form, calibrate, prop2_check, sample_grid, Prop2Calibration, Prop2Outcome};
pub use tm::{Kind, ReferenceMachine, Run};
