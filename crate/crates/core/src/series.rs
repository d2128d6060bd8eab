//! Input series, compressed representation and linear-interpolation
//! decompression.

use alloc::format;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::measure::QualityMeasure;

/// An equidistant sequence of finite samples, `n >= 2`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    values: Vec<f64>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooShort(values.len()));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

/// Which statistic the compressor preserves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum StatKind {
    #[default]
    Acf,
    Pacf,
}

impl StatKind {
    pub fn code(self) -> u8 {
        match self {
            StatKind::Acf => 0,
            StatKind::Pacf => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(StatKind::Acf),
            1 => Some(StatKind::Pacf),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            StatKind::Acf => "acf",
            StatKind::Pacf => "pacf",
        }
    }
}

/// Tumbling-window aggregate applied before the statistic is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum AggKind {
    #[default]
    None,
    Mean,
    Sum,
    Min,
    Max,
}

impl AggKind {
    pub fn name(self) -> &'static str {
        match self {
            AggKind::None => "none",
            AggKind::Mean => "mean",
            AggKind::Sum => "sum",
            AggKind::Min => "min",
            AggKind::Max => "max",
        }
    }
}

/// A surviving sample. `index` is 1-based, as in the on-disk format.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeptPoint {
    pub index: u64,
    pub value: f64,
}

/// Kept points plus the configuration that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct CompressedSeries {
    pub kept: Vec<KeptPoint>,
    pub original_length: u64,
    pub stat: StatKind,
    pub lags: u32,
    pub window: u32,
    pub agg: AggKind,
    pub epsilon: f64,
    pub metric: QualityMeasure,
}

impl CompressedSeries {
    /// Checks the kept list: sorted, unique, endpoints present, within `[1, n]`.
    pub fn validate(&self) -> Result<()> {
        let n = self.original_length;
        if n < 2 {
            return Err(Error::Format(format!("original length {n} < 2")));
        }
        if self.kept.len() < 2 {
            return Err(Error::Format(format!("{} kept points, need >= 2", self.kept.len())));
        }
        if self.kept[0].index != 1 {
            return Err(Error::Format("first kept index is not 1".into()));
        }
        if self.kept[self.kept.len() - 1].index != n {
            return Err(Error::Format(format!("last kept index is not {n}")));
        }
        for w in self.kept.windows(2) {
            if w[1].index <= w[0].index {
                return Err(Error::Format(format!("kept indices not strictly increasing at {}", w[1].index)));
            }
        }
        if let Some(p) = self.kept.iter().find(|p| !p.value.is_finite()) {
            return Err(Error::Format(format!("non-finite value at index {}", p.index)));
        }
        Ok(())
    }

    pub fn kept_len(&self) -> usize {
        self.kept.len()
    }

    /// `n / n'`.
    pub fn compression_ratio(&self) -> f64 {
        self.original_length as f64 / self.kept.len() as f64
    }

    /// Payload bits per original sample: `64 * n' / n`. Header bytes are not
    /// counted.
    pub fn bits_per_value(&self) -> f64 {
        64.0 * self.kept.len() as f64 / self.original_length as f64
    }
}

/// Rebuilds the full-length series by linear interpolation between kept points.
pub fn decompress(cs: &CompressedSeries) -> Result<TimeSeries> {
    cs.validate()?;
    let n = cs.original_length as usize;
    let mut out = Vec::with_capacity(n);
    out.push(cs.kept[0].value);
    for pair in cs.kept.windows(2) {
        let (a, b) = (pair[0], pair[1]);
        let (ia, ib) = (a.index as usize - 1, b.index as usize - 1);
        fill_segment(&mut out, ia, a.value, ib, b.value);
    }
    TimeSeries::new(out)
}

/// Appends values for `(left, right]`, with `right` carrying `right_value`
/// exactly.
fn fill_segment(out: &mut Vec<f64>, left: usize, left_value: f64, right: usize, right_value: f64) {
    for k in left + 1..right {
        out.push(interpolate(left, left_value, right, right_value, k));
    }
    out.push(right_value);
}

/// Value at `k` of the line through `(left, lv)` and `(right, rv)`.
///
/// Every interpolated value in the crate goes through here so that the
/// compressor's bookkeeping and [`decompress`] agree bit for bit.
#[inline]
pub fn interpolate(left: usize, lv: f64, right: usize, rv: f64, k: usize) -> f64 {
    let t = (k - left) as f64 / (right - left) as f64;
    lv + (rv - lv) * t
}

/// Reconstruction from a 0-based sorted list of kept indices over `values`.
pub fn reconstruct_from_kept(values: &[f64], kept: &[usize]) -> Vec<f64> {
    let mut out = Vec::with_capacity(values.len());
    out.push(values[kept[0]]);
    for pair in kept.windows(2) {
        fill_segment(&mut out, pair[0], values[pair[0]], pair[1], values[pair[1]]);
    }
    out
}
