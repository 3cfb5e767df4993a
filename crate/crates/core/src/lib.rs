//! Quasi-static simulation of a thermally driven, antagonistic shape-memory
//! gripper: two bistable lobes closed by heating and optionally reopened by
//! pre-strained strands of a second polymer.
//!
//! The pipeline is `material` (programming and recovery of a shape-memory
//! polymer) -> `mechanics` (lobe and strand energies) -> `solver` (tracking the
//! equilibrium through a temperature ramp) -> `experiments` (metrics, sweeps).
//! `calibration` fits material parameters to blocked-force data and `io`
//! reads and writes the file formats used by the `avf` binary.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod calibration;
pub mod config;
pub mod error;
pub mod experiments;
pub mod io;
pub mod material;
pub mod mechanics;
pub mod solver;
pub mod stats;

pub use error::{Error, Result};
