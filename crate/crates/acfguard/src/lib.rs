//! Command-line tooling, file formats and multi-threaded drivers around
//! [`acfguard_core`].

#![forbid(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod io;
pub mod json;
pub mod parallel;
pub mod plot;
pub mod synth;

pub use acfguard_core as core;
