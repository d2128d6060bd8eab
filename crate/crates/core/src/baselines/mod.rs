//! Reference compressors.
//!
//! VW, TP and PIP choose points by their own geometric criteria but stop
//! under the same statistic bound as the main compressor. PMC, SWING and DFT
//! are driven by their native parameter only; [`sweep`] explores that
//! parameter and records the resulting statistic deviation.

mod dft;
mod pip;
mod segments;
mod sweep;
mod tp;
mod vw;

pub use dft::{compress_dft, dft, DftCoefficients};
pub use pip::{compress_pip, PipDistance};
pub use segments::{compress_pmc, compress_swing, Segment, SegmentList};
pub use sweep::{run_parametric, sweep, ParametricOutput, SweepRow};
pub use tp::{compress_tp, is_turning_point, TpScore};
pub use vw::{compress_vw, triangle_area};

use crate::cameo::CompressorConfig;
use crate::error::Result;
use crate::report::CompressionReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Cameo,
    Vw,
    TpSum,
    TpMean,
    PipVertical,
    PipEuclidean,
    Pmc,
    Swing,
    Dft,
}

impl Method {
    pub const ALL: [Method; 9] = [
        Method::Cameo,
        Method::Vw,
        Method::TpSum,
        Method::TpMean,
        Method::PipVertical,
        Method::PipEuclidean,
        Method::Pmc,
        Method::Swing,
        Method::Dft,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Method::Cameo => "cameo",
            Method::Vw => "vw",
            Method::TpSum => "tps",
            Method::TpMean => "tpm",
            Method::PipVertical => "pipv",
            Method::PipEuclidean => "pipe",
            Method::Pmc => "pmc",
            Method::Swing => "swing",
            Method::Dft => "dft",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|m| m.name().eq_ignore_ascii_case(s))
    }

    /// Methods driven by a native parameter rather than the statistic bound.
    pub fn is_parametric(self) -> bool {
        matches!(self, Method::Pmc | Method::Swing | Method::Dft)
    }
}

/// Measures a reconstruction produced by a parametric method.
pub(crate) fn assess(
    method: Method,
    original: &[f64],
    reconstruction: &[f64],
    bits_per_value: f64,
    cfg: &CompressorConfig,
) -> Result<CompressionReport> {
    CompressionReport::assess(
        method.name(),
        original,
        reconstruction,
        &cfg.stat_config(),
        cfg.metric,
        cfg.epsilon,
        bits_per_value,
    )
}
