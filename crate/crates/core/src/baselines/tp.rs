//! Turning-point compression.
//!
//! Phase one keeps only the endpoints and the points where the series turns,
//! in a single bulk removal. If that already breaks the bound the run fails
//! with an explicit report. Otherwise phase two removes remaining turning
//! points in order of a local reconstruction-error score while the statistic
//! stays within the bound.

use alloc::sync::Arc;
use alloc::vec::Vec;

use crate::cameo::{CompressorConfig, Engine, Ranking, Sequential};
use crate::error::Result;
use crate::report::CompressionReport;
use crate::series::{reconstruct_from_kept, CompressedSeries, KeptPoint, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TpScore {
    /// Sum of absolute errors over the bridged points.
    Sum,
    /// Mean absolute error over the bridged points.
    Mean,
}

/// Interior point where the direction changes. A flat step next to a slope
/// counts, so both corners of a plateau survive.
pub fn is_turning_point(x: &[f64], i: usize) -> bool {
    let a = x[i] - x[i - 1];
    let b = x[i + 1] - x[i];
    a * b < 0.0 || ((a == 0.0) != (b == 0.0))
}

pub fn compress_tp(
    series: &TimeSeries,
    cfg: &CompressorConfig,
    score: TpScore,
) -> Result<(CompressedSeries, CompressionReport)> {
    let x = series.values();
    let n = x.len();
    let alive: Vec<bool> = (0..n).map(|i| i == 0 || i + 1 == n || is_turning_point(x, i)).collect();
    let kept: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
    let ranking = match score {
        TpScore::Sum => Ranking::BridgeSum,
        TpScore::Mean => Ranking::BridgeMean,
    };

    cfg.validate(n)?;
    if kept.len() < n {
        let recon = reconstruct_from_kept(x, &kept);
        let bpv = 64.0 * kept.len() as f64 / n as f64;
        let mut report = CompressionReport::assess(
            ranking.method_name(),
            x,
            &recon,
            &cfg.stat_config(),
            cfg.metric,
            cfg.epsilon,
            bpv,
        )?;
        if !report.verification.passed {
            report.removals = n - kept.len();
            report.note = Some(alloc::format!(
                "constraint unsatisfiable by TP: keeping only turning points gives deviation {} >= {}",
                report.verification.scratch_acf_dev,
                cfg.epsilon
            ));
            let cs = CompressedSeries {
                kept: kept.iter().map(|&i| KeptPoint { index: i as u64 + 1, value: x[i] }).collect(),
                original_length: n as u64,
                stat: cfg.stat,
                lags: cfg.lags as u32,
                window: cfg.window as u32,
                agg: cfg.agg,
                epsilon: cfg.epsilon,
                metric: cfg.metric,
            };
            return Ok((cs, report));
        }
    }

    let removable: Vec<bool> = (0..n).map(|i| alive[i] && i > 0 && i + 1 < n).collect();
    let mut engine = Engine::from_state(x, alive, &removable, None, *cfg, ranking, Arc::new(Sequential))?;
    engine.run()?;
    let (cs, mut report) = engine.finish()?;
    report.removals = n - cs.kept_len();
    Ok((cs, report))
}
