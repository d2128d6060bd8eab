//! JSON documents for run reports and parameter sweeps.
//!
//! Field order follows the struct definitions, so output is byte-stable for
//! equal inputs.

use std::collections::BTreeMap;

use acfguard_core::baselines::SweepRow;
use acfguard_core::cameo::StopMode;
use acfguard_core::{CompressionReport, CompressorConfig, Hops};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub stat: String,
    pub metric: String,
    pub lags: usize,
    pub epsilon: f64,
    pub window: usize,
    pub agg: String,
    pub hops: String,
    pub mode: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_cr: Option<f64>,
    pub refresh_stale: bool,
    pub threads_fine: usize,
    pub threads_coarse: usize,
    pub budget_fraction: f64,
}

impl ConfigEcho {
    pub fn new(cfg: &CompressorConfig, threads_fine: usize, threads_coarse: usize, budget_fraction: f64) -> Self {
        let (mode, target_cr) = match cfg.mode {
            StopMode::ErrorBound => ("error-bound", None),
            StopMode::TargetRatio(c) => ("target-cr", Some(c)),
        };
        Self {
            stat: cfg.stat.name().into(),
            metric: cfg.metric.name().into(),
            lags: cfg.lags,
            epsilon: cfg.epsilon,
            window: cfg.window,
            agg: cfg.agg.name().into(),
            hops: hops_name(cfg.hops),
            mode: mode.into(),
            target_cr,
            refresh_stale: cfg.refresh_stale,
            threads_fine,
            threads_coarse,
            budget_fraction,
        }
    }
}

pub fn hops_name(h: Hops) -> String {
    match h {
        Hops::Fixed(n) => n.to_string(),
        Hops::LogN => "logn".into(),
        Hops::KLogN(k) => format!("{k}xlogn"),
        Hops::Full => "full".into(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationDoc {
    pub scratch_acf_dev: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportDoc {
    pub method: String,
    pub config: ConfigEcho,
    pub n: usize,
    pub kept: usize,
    pub cr: f64,
    pub bits_per_value: f64,
    /// Keyed by measure name; measures undefined for the pair are absent.
    pub acf_deviation: BTreeMap<String, f64>,
    pub nrmse: Option<f64>,
    pub msmape: Option<f64>,
    pub runtime_ms: f64,
    pub verification: VerificationDoc,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_drift: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ReportDoc {
    pub fn new(report: &CompressionReport, config: ConfigEcho) -> Self {
        Self {
            method: report.method.clone(),
            config,
            n: report.n,
            kept: report.kept,
            cr: report.cr,
            bits_per_value: report.bits_per_value,
            acf_deviation: report.acf_deviation.iter().map(|(m, d)| (m.name().to_string(), *d)).collect(),
            nrmse: report.nrmse,
            msmape: report.msmape,
            runtime_ms: report.runtime_ms,
            verification: VerificationDoc {
                scratch_acf_dev: json_number(report.verification.scratch_acf_dev),
                passed: report.verification.passed,
            },
            max_drift: report.max_drift,
            note: report.note.clone(),
        }
    }
}

/// JSON has no infinity; an undefined deviation is written as the largest
/// finite double.
fn json_number(v: f64) -> f64 {
    if v.is_finite() {
        v
    } else {
        f64::MAX
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub param: f64,
    pub cr: f64,
    pub acf_dev: f64,
    pub nrmse: Option<f64>,
}

impl From<&SweepRow> for SweepPoint {
    fn from(r: &SweepRow) -> Self {
        Self { param: r.param, cr: r.cr, acf_dev: json_number(r.acf_dev), nrmse: r.nrmse }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepDoc {
    pub method: String,
    pub config: ConfigEcho,
    pub frontier: Vec<SweepPoint>,
}

pub fn to_json<T: Serialize>(doc: &T) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("documents always serialize");
    s.push('\n');
    s
}
