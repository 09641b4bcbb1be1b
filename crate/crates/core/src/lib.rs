//! Lie-theoretic and cohomological combinatorics of complete flag manifolds.
//!
//! Indices are 0-based throughout the library. The command-line tool, its
//! JSON output and the C interface use 1-based node indices.

#![allow(clippy::needless_range_loop)]

pub mod bottsamelson;
pub mod cache;
pub mod charcalc;
pub mod cli;
pub mod descent;
pub mod dynkin;
pub mod io;
pub mod lattice;
pub mod repro;
pub mod weyl;

pub use charcalc::{CohomologyProfile, GroupAlgebraElement};
pub use descent::CohomologyValue;
pub use dynkin::{CartanData, DynkinDiagram, TypeLabel};
pub use lattice::DivisorClass;
pub use weyl::{Root, RootSystem, WeylElement};
