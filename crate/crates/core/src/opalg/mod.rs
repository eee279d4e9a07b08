//! Complex operator algebra: distances, fidelity, PSD order, spectra,
//! thresholding, null spaces and the projection capacity predicate.

pub mod io;
pub mod lowrank;
mod operator;
pub mod random;
pub mod sparse;
pub mod spectral;
mod state;

pub use io::{parse_operator, write_operator};
pub use lowrank::{LowRank, SparseVec};
pub use operator::{Backend, Flag, Flags, Operator};
pub use sparse::SparseOperator;
pub use spectral::{
    capacity_check, capacity_check_within, check_orthonormal, eigh, eigh_matrix, fidelity_pure, null_space,
    projection_rank, psd_leq, psd_leq_within, threshold_projection, threshold_projection_within,
    trace_distance, CapacityReport, Eigh,
};
pub use state::{bits_to_index, index_to_bits, PureState};
