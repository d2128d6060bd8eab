//! Lossy time-series compression with a hard bound on the deviation of the
//! autocorrelation (ACF) or partial autocorrelation (PACF) function.
//!
//! Points are removed greedily, cheapest first, and reconstructed by linear
//! interpolation. The ACF is kept current through five running sums per lag,
//! so each candidate removal is priced in `O(mL)` rather than `O(nL)`.
//!
//! This crate is `no_std` and only needs `alloc`. Threads, file formats and
//! the command line live in the `acfguard` crate.

#![no_std]
#![forbid(unsafe_code)]
// `!(x >= t)` is used on purpose so NaN falls on the rejecting side
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![cfg_attr(test, allow(clippy::needless_range_loop))]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod acf;
pub mod baselines;
pub mod cameo;
pub mod error;
pub mod heap;
mod math;
pub mod measure;
pub mod report;
pub mod series;
pub mod stat;
pub mod window;

pub use acf::{AcfAggregates, AcfVector};
pub use cameo::{compress, CompressorConfig, Engine, Hops, StopMode};
pub use error::{Error, Result};
pub use measure::{measure, QualityMeasure};
pub use report::{CompressionReport, Verification};
pub use series::{decompress, AggKind, CompressedSeries, KeptPoint, StatKind, TimeSeries};
pub use stat::StatConfig;
pub use window::WindowAggregates;
