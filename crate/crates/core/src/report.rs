//! Outcome of a compression run, measured on the reconstruction.

use alloc::string::String;
use alloc::vec::Vec;

use crate::error::Result;
use crate::measure::{measure, QualityMeasure};
use crate::stat::StatConfig;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Verification {
    /// Deviation of the statistic recomputed from scratch on the
    /// reconstruction, under the configured metric.
    pub scratch_acf_dev: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressionReport {
    pub method: String,
    pub n: usize,
    /// Kept samples, or the equivalent in 64-bit words for methods that
    /// store segments or coefficients.
    pub kept: usize,
    pub cr: f64,
    pub bits_per_value: f64,
    pub metric: QualityMeasure,
    pub epsilon: f64,
    /// Statistic deviation under every measure that is defined for it.
    pub acf_deviation: Vec<(QualityMeasure, f64)>,
    pub nrmse: Option<f64>,
    pub msmape: Option<f64>,
    /// Filled in by callers that can read a clock.
    pub runtime_ms: f64,
    pub verification: Verification,
    pub removals: usize,
    /// Largest incremental-vs-scratch ACF gap seen at periodic checkpoints.
    pub max_drift: Option<f64>,
    pub note: Option<String>,
}

impl CompressionReport {
    /// Measures `reconstruction` against `original`. A reconstruction whose
    /// statistic is undefined (for instance a constant series) gets an
    /// infinite deviation and fails verification.
    pub fn assess(
        method: &str,
        original: &[f64],
        reconstruction: &[f64],
        stat: &StatConfig,
        metric: QualityMeasure,
        epsilon: f64,
        bits_per_value: f64,
    ) -> Result<Self> {
        let reference = stat.compute(original)?;
        let got = stat.compute(reconstruction);
        let (dev, acf_deviation) = match &got {
            Ok(v) => {
                let dev = measure(metric, reference.values(), v.values())?;
                let all = QualityMeasure::ALL
                    .iter()
                    .filter_map(|&m| measure(m, reference.values(), v.values()).ok().map(|d| (m, d)))
                    .collect();
                (dev, all)
            }
            Err(_) => (f64::INFINITY, Vec::new()),
        };
        let n = original.len();
        Ok(Self {
            method: method.into(),
            n,
            kept: libm::round(bits_per_value * n as f64 / 64.0) as usize,
            cr: 64.0 / bits_per_value,
            bits_per_value,
            metric,
            epsilon,
            acf_deviation,
            nrmse: measure(QualityMeasure::Nrmse, original, reconstruction).ok(),
            msmape: measure(QualityMeasure::MSmape, original, reconstruction).ok(),
            runtime_ms: 0.0,
            verification: Verification { scratch_acf_dev: dev, passed: dev < epsilon },
            removals: 0,
            max_drift: None,
            note: got.err().map(|e| alloc::format!("{e}")),
        })
    }

    pub fn deviation(&self, m: QualityMeasure) -> Option<f64> {
        self.acf_deviation.iter().find(|(k, _)| *k == m).map(|p| p.1)
    }
}
