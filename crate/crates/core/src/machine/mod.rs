//! Quantum Turing machines on looped finite tapes: definitions, the
//! configuration basis, unitary evolution, halting and output extraction.

mod config;
mod def;
mod evolution;
mod output;
mod parse;

pub use config::{Config, ConfigSpace, MAX_INDEXED_DIM};
pub use def::{
    max_rule_norm, symbols, AmpPart, Amplitude, Completion, Move, QTMDef, RuleKey, Symbol, Transition,
};
pub use evolution::{
    build_evolution, embed_bits, embed_ensemble, embed_input, embed_vector, evolve, evolve_with,
    exact_halting_time, exact_wellformed_check, final_weight, halting_profile, step, step_exact, successors,
    trajectory, wellformed_check, wellformed_check_within, ConfigMixture, HaltDiagnostic, HaltingProfile,
    StateVec, WellFormedReport,
};
pub use output::{
    extract_output, extract_output_with, output_image, output_string, IndeterminateState, OutputImage,
};
pub use parse::{parse_machine, parse_machine_exact};
