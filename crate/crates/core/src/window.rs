//! Tumbling-window aggregation and its incremental maintenance.
//!
//! With window `κ` the statistic is computed over `a_i = Agg(x[iκ .. (i+1)κ])`
//! for `i < ⌊n/κ⌋`; samples past the last full window do not contribute.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::series::AggKind;

#[derive(Debug, Clone, PartialEq)]
pub struct WindowAggregates {
    values: Vec<f64>,
    window: usize,
    kind: AggKind,
}

/// Change to a run of consecutive windows produced by one edit.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct WindowEdit {
    /// First affected window.
    pub first: usize,
    /// `new − old` per window, starting at `first`.
    pub deltas: Vec<f64>,
    /// New aggregate per window, starting at `first`.
    pub values: Vec<f64>,
}

impl WindowEdit {
    pub fn is_empty(&self) -> bool {
        self.deltas.is_empty()
    }
}

fn reduce(kind: AggKind, w: &[f64]) -> f64 {
    match kind {
        AggKind::None | AggKind::Sum => w.iter().sum(),
        AggKind::Mean => w.iter().sum::<f64>() / w.len() as f64,
        AggKind::Min => w.iter().copied().fold(f64::INFINITY, f64::min),
        AggKind::Max => w.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    }
}

/// Checks the `(window, agg)` pair on its own.
pub fn check_window(window: usize, kind: AggKind) -> Result<()> {
    if window == 0 {
        return Err(Error::Config("window must be at least 1".into()));
    }
    if kind == AggKind::None && window != 1 {
        return Err(Error::Config("window > 1 needs an aggregate (mean, sum, min or max)".into()));
    }
    Ok(())
}

/// Aggregates `x` over tumbling windows of size `window`.
pub fn window_aggregate(x: &[f64], window: usize, kind: AggKind) -> Result<WindowAggregates> {
    check_window(window, kind)?;
    if x.len() < 2 * window {
        return Err(Error::ShortForWindow);
    }
    let values = if window == 1 { x.to_vec() } else { x.chunks_exact(window).map(|w| reduce(kind, w)).collect() };
    Ok(WindowAggregates { values, window, kind })
}

impl WindowAggregates {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn window(&self) -> usize {
        self.window
    }

    pub fn kind(&self) -> AggKind {
        self.kind
    }

    /// Window changes caused by setting `x[start + j] = new[j]`, where `x`
    /// holds the current (pre-edit) values. Does not modify `self`.
    pub fn edit(&self, x: &[f64], start: usize, new: &[f64]) -> WindowEdit {
        let k = self.window;
        if new.is_empty() {
            return WindowEdit::default();
        }
        let first = start / k;
        let last = ((start + new.len() - 1) / k).min(self.values.len().wrapping_sub(1));
        if first >= self.values.len() || last < first {
            return WindowEdit::default();
        }
        let end = start + new.len();
        let mut edit = WindowEdit {
            first,
            deltas: Vec::with_capacity(last - first + 1),
            values: Vec::with_capacity(last - first + 1),
        };
        for w in first..=last {
            let lo = (w * k).max(start);
            let hi = ((w + 1) * k).min(end);
            let old_a = self.values[w];
            // Width-1 windows are the samples themselves for every kind; taking
            // the new value directly keeps this path bit-identical to `None`.
            let kind = if k == 1 { AggKind::None } else { self.kind };
            let new_a = match kind {
                AggKind::None => new[lo - start],
                AggKind::Sum | AggKind::Mean => {
                    let d: f64 = (lo..hi).map(|t| new[t - start] - x[t]).sum();
                    if kind == AggKind::Mean {
                        old_a + d / k as f64
                    } else {
                        old_a + d
                    }
                }
                AggKind::Min | AggKind::Max => {
                    let is_min = kind == AggKind::Min;
                    let lost_extremum = (lo..hi).any(|t| x[t] == old_a && new[t - start] != old_a);
                    if lost_extremum {
                        let full =
                            (w * k..(w + 1) * k).map(|t| if (start..end).contains(&t) { new[t - start] } else { x[t] });
                        if is_min {
                            full.fold(f64::INFINITY, f64::min)
                        } else {
                            full.fold(f64::NEG_INFINITY, f64::max)
                        }
                    } else {
                        let edited = (lo..hi).map(|t| new[t - start]);
                        if is_min {
                            edited.fold(old_a, f64::min)
                        } else {
                            edited.fold(old_a, f64::max)
                        }
                    }
                }
            };
            edit.deltas.push(new_a - old_a);
            edit.values.push(new_a);
        }
        edit
    }

    pub fn apply(&mut self, edit: &WindowEdit) {
        for (j, v) in edit.values.iter().enumerate() {
            self.values[edit.first + j] = *v;
        }
    }
}
