//! Numeric tolerances shared by every module.

/// Flag checks and spectral comparisons.
pub const EPS_NUM: f64 = 1e-9;

/// Final-state weight tolerance for float halting decisions.
pub const ETA_HALT: f64 = 1e-6;

/// Null-space cut-off for stacked halting constraints.
pub const ETA_SUB: f64 = 1e-7;

/// Largest allowed distance between a projection trace and its rounded rank.
pub const RANK_MISMATCH: f64 = 0.01;

/// Eigenvalue threshold used to turn O into N.
pub const THETA: f64 = 0.5;

/// Longest looped tape window the packed configuration supports.
pub const MAX_WINDOW: usize = 64;
