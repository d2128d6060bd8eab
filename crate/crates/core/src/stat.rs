//! The statistic being preserved: ACF or PACF over lags `1..=L`, optionally
//! on a window-aggregated series.

use crate::acf::{acf_scratch, pacf_from_acf, AcfVector};
use crate::error::Result;
use crate::series::{AggKind, StatKind};
use crate::window::{check_window, window_aggregate};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StatConfig {
    pub stat: StatKind,
    pub lags: usize,
    pub window: usize,
    pub agg: AggKind,
}

impl Default for StatConfig {
    fn default() -> Self {
        Self { stat: StatKind::Acf, lags: 1, window: 1, agg: AggKind::None }
    }
}

impl StatConfig {
    pub fn acf(lags: usize) -> Self {
        Self { lags, ..Self::default() }
    }

    pub fn validate(&self, n: usize) -> Result<()> {
        check_window(self.window, self.agg)?;
        let eff = n / self.window;
        if n < 2 * self.window || self.lags >= eff {
            return Err(crate::Error::Config(alloc::format!(
                "lags {} need more than {} samples after aggregation by {}",
                self.lags,
                self.lags,
                self.window
            )));
        }
        if self.lags == 0 {
            return Err(crate::Error::Config("lag count must be positive".into()));
        }
        Ok(())
    }

    /// The statistic computed from scratch on `x`.
    pub fn compute(&self, x: &[f64]) -> Result<AcfVector> {
        let w = window_aggregate(x, self.window, self.agg)?;
        let acf = acf_scratch(w.values(), self.lags)?;
        match self.stat {
            StatKind::Acf => Ok(acf),
            StatKind::Pacf => pacf_from_acf(&acf),
        }
    }
}
