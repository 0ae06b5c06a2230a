//! Exact-permanent laboratory for random sign matrices.
//!
//! The crate computes permanents of `±1` matrices exactly, builds the lattice
//! of all leading minors by cofactor expansion, runs the heavy-minor growth and
//! endgame processes against that lattice, and checks the moment identities and
//! anti-concentration bounds that govern them.

pub mod endgame;
pub mod engines;
pub mod error;
pub mod growth;
pub mod lattice;
pub mod matrix;
pub mod rng;
pub mod subset;
pub mod verify;

pub use engines::{
    determinant_exact, determinant_naive, permanent_mod, permanent_naive, permanent_ryser, ExactInt,
};
pub use error::{Error, Result};
pub use growth::{run_growth, MatrixRows, ProcessConfig, ProcessTrace, RandomRows, RowSource, StepType};
pub use lattice::{
    build_lattice, heavy_members, parent_histogram, split_events, HeavyFamily, MinorTable, ParentHistogram, Split,
    SplitOutcome, Threshold,
};
pub use matrix::{enumerate_all_sign_matrices, sample_row, sample_sign_matrix, RowPrefix, SignMatrix};
pub use rng::RngStream;
pub use subset::ColumnSet;
