//! Error-bounded piecewise approximations: PMC (constant segments) and SWING
//! (linear segments). Both guarantee `|x_i − x̂_i| <= max_dev` for every
//! sample; the bound is checked on the actual reconstruction, so rounding in
//! the fitted values can only shorten a segment, never violate it.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::abs;
use crate::series::interpolate;

/// Inclusive 0-based range `[start, end]` reconstructed as the line from
/// `first_value` to `last_value`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Segment {
    pub start: usize,
    pub end: usize,
    pub first_value: f64,
    pub last_value: f64,
}

impl Segment {
    fn value_at(&self, k: usize) -> f64 {
        if self.start == self.end {
            self.first_value
        } else {
            interpolate(self.start, self.first_value, self.end, self.last_value, k)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SegmentList {
    pub n: usize,
    pub segments: Vec<Segment>,
    /// Storage cost of one segment: 128 for PMC (value and end index), 192
    /// for SWING (two values and end index).
    pub bits_per_segment: u32,
}

impl SegmentList {
    pub fn reconstruct(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.n);
        for s in &self.segments {
            out.extend((s.start..=s.end).map(|k| s.value_at(k)));
        }
        out
    }

    pub fn bits_per_value(&self) -> f64 {
        self.bits_per_segment as f64 * self.segments.len() as f64 / self.n as f64
    }

    pub fn compression_ratio(&self) -> f64 {
        64.0 / self.bits_per_value()
    }
}

fn check_dev(max_dev: f64) -> Result<()> {
    if !(max_dev >= 0.0) || !max_dev.is_finite() {
        return Err(Error::Config(alloc::format!("max deviation must be a finite value >= 0, got {max_dev}")));
    }
    Ok(())
}

fn fits(x: &[f64], seg: &Segment, max_dev: f64) -> bool {
    (seg.start..=seg.end).all(|k| abs(x[k] - seg.value_at(k)) <= max_dev)
}

/// Poor Man's Compression: a segment grows while its range stays within
/// `2·max_dev` and is emitted as its midrange.
pub fn compress_pmc(x: &[f64], max_dev: f64) -> Result<SegmentList> {
    check_dev(max_dev)?;
    if x.is_empty() {
        return Err(Error::Empty);
    }
    let mut segments = Vec::new();
    let mut start = 0;
    while start < x.len() {
        let (mut lo, mut hi) = (x[start], x[start]);
        let mut end = start;
        while end + 1 < x.len() {
            let (nlo, nhi) = (lo.min(x[end + 1]), hi.max(x[end + 1]));
            let mid = nlo + (nhi - nlo) / 2.0;
            if nhi - mid > max_dev || mid - nlo > max_dev {
                break;
            }
            lo = nlo;
            hi = nhi;
            end += 1;
        }
        let mid = lo + (hi - lo) / 2.0;
        segments.push(Segment { start, end, first_value: mid, last_value: mid });
        start = end + 1;
    }
    Ok(SegmentList { n: x.len(), segments, bits_per_segment: 128 })
}

/// Slope window of a segment anchored at `(s, x[s])` over `s+1..=e`.
fn slope_bounds(x: &[f64], s: usize, e: usize, dev: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
    for t in s + 1..=e {
        let dt = (t - s) as f64;
        lo = lo.max((x[t] - dev - x[s]) / dt);
        hi = hi.min((x[t] + dev - x[s]) / dt);
    }
    (lo, hi)
}

fn swing_segment(x: &[f64], s: usize, e: usize, dev: f64) -> Segment {
    if e == s {
        return Segment { start: s, end: e, first_value: x[s], last_value: x[s] };
    }
    let (lo, hi) = slope_bounds(x, s, e, dev);
    let slope = lo + (hi - lo) / 2.0;
    Segment { start: s, end: e, first_value: x[s], last_value: x[s] + slope * (e - s) as f64 }
}

/// SWING filter: each segment starts exactly at its first sample and keeps
/// the range of slopes that stays within `max_dev` of every later sample;
/// it closes when that range becomes empty.
pub fn compress_swing(x: &[f64], max_dev: f64) -> Result<SegmentList> {
    check_dev(max_dev)?;
    if x.is_empty() {
        return Err(Error::Empty);
    }
    let mut segments = Vec::new();
    let mut s = 0;
    while s < x.len() {
        let (mut lo, mut hi) = (f64::NEG_INFINITY, f64::INFINITY);
        let mut e = s;
        while e + 1 < x.len() {
            let t = e + 1;
            let dt = (t - s) as f64;
            let nlo = lo.max((x[t] - max_dev - x[s]) / dt);
            let nhi = hi.min((x[t] + max_dev - x[s]) / dt);
            if nlo > nhi {
                break;
            }
            lo = nlo;
            hi = nhi;
            e = t;
        }
        let mut seg = swing_segment(x, s, e, max_dev);
        while !fits(x, &seg, max_dev) {
            seg = swing_segment(x, s, seg.end - 1, max_dev);
        }
        s = seg.end + 1;
        segments.push(seg);
    }
    Ok(SegmentList { n: x.len(), segments, bits_per_segment: 192 })
}
