//! Greedy point removal under an ACF/PACF deviation bound.

mod engine;

use alloc::sync::Arc;
use alloc::vec::Vec;

pub use engine::{CommitRecord, Engine, ImpactEvaluator, Ranking, Sequential, Step};

use crate::error::{Error, Result};
use crate::math::ceil_log2;
use crate::measure::QualityMeasure;
use crate::report::CompressionReport;
use crate::series::{AggKind, CompressedSeries, StatKind, TimeSeries};
use crate::stat::StatConfig;

/// How far re-ranking walks along the surviving-neighbor chain after each
/// removal, in surviving points per side.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Hops {
    Fixed(usize),
    /// `⌈log2 n⌉`, times the window size when aggregating.
    LogN,
    /// `k·⌈log2 n⌉`, times the window size when aggregating.
    KLogN(usize),
    /// Every surviving point.
    Full,
}

impl Default for Hops {
    fn default() -> Self {
        Hops::KLogN(10)
    }
}

impl Hops {
    pub fn resolve(self, n: usize, window: usize) -> usize {
        match self {
            Hops::Fixed(h) => h,
            Hops::LogN => ceil_log2(n) * window,
            Hops::KLogN(k) => k * ceil_log2(n) * window,
            Hops::Full => n,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum StopMode {
    /// Stop before the first removal whose deviation would reach `epsilon`.
    #[default]
    ErrorBound,
    /// Remove until `n / n' >= c`, ignoring `epsilon`.
    TargetRatio(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressorConfig {
    pub epsilon: f64,
    pub lags: usize,
    pub stat: StatKind,
    pub metric: QualityMeasure,
    pub window: usize,
    pub agg: AggKind,
    pub hops: Hops,
    pub mode: StopMode,
    /// Compare the running sums against a fresh recomputation every
    /// `⌈n/10⌉` removals and record the largest ACF gap.
    pub drift_check: bool,
    /// Re-evaluate a popped candidate whose queued impact predates the last
    /// removal, and re-queue it instead of acting on the old value. The
    /// removal order stays independent of `epsilon`.
    pub refresh_stale: bool,
}

impl CompressorConfig {
    pub fn new(epsilon: f64, lags: usize) -> Self {
        Self {
            epsilon,
            lags,
            stat: StatKind::Acf,
            metric: QualityMeasure::Mae,
            window: 1,
            agg: AggKind::None,
            hops: Hops::default(),
            mode: StopMode::ErrorBound,
            drift_check: false,
            refresh_stale: true,
        }
    }

    pub fn stat_config(&self) -> StatConfig {
        StatConfig { stat: self.stat, lags: self.lags, window: self.window, agg: self.agg }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        if !(self.epsilon >= 0.0) {
            return Err(Error::Config(alloc::format!("epsilon must be >= 0, got {}", self.epsilon)));
        }
        if let StopMode::TargetRatio(c) = self.mode {
            if !(c > 1.0) || !c.is_finite() {
                return Err(Error::Config(alloc::format!("target ratio must be a finite value > 1, got {c}")));
            }
        }
        self.stat_config().validate(n)
    }
}

/// Runs the compressor single-threaded.
pub fn compress(series: &TimeSeries, cfg: CompressorConfig) -> Result<(CompressedSeries, CompressionReport)> {
    compress_with(series, cfg, Arc::new(Sequential))
}

/// Runs the compressor with a custom evaluator for neighbor re-ranking.
pub fn compress_with(
    series: &TimeSeries,
    cfg: CompressorConfig,
    evaluator: Arc<dyn ImpactEvaluator>,
) -> Result<(CompressedSeries, CompressionReport)> {
    let mut engine = Engine::with_evaluator(series.values(), cfg, evaluator)?;
    engine.run()?;
    engine.finish()
}

/// Impact of every point on the unmodified series; `+inf` at the endpoints.
pub fn get_all_impact(series: &TimeSeries, cfg: CompressorConfig) -> Result<Vec<f64>> {
    let engine = Engine::new(series.values(), cfg)?;
    Ok((0..series.len()).map(|i| engine.queued_impact(i)).collect())
}
