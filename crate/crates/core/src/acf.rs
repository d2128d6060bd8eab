//! Autocorrelation from scratch and from incrementally maintained sums.
//!
//! Indexing is 0-based internally. For a series of length `N` and lag `l`
//! the leading window is `[0, N - l)` and the lagged window is `[l, N)`; both
//! hold `N - l` samples. The per-lag ACF is the Pearson correlation of the
//! two windows, each with its own mean and variance:
//!
//! ```text
//!            (N-l)·Σ x_t x_{t+l} − Σ x_t · Σ x_{t+l}
//! ρ_l = ─────────────────────────────────────────────────────────────
//!       sqrt(((N-l)·Σ x_t² − (Σ x_t)²) · ((N-l)·Σ x_{t+l}² − (Σ x_{t+l})²))
//! ```
//!
//! [`AcfAggregates`] stores the five sums of that expression per lag. Sums
//! are taken over `x − shift`; the ACF does not depend on the shift, and
//! centering near the mean keeps the numerator and denominators away from
//! catastrophic cancellation over long edit sequences.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use crate::error::{Error, Result};
use crate::math::{abs, sqrt};

/// Statistic values for lags `1..=L`; `values()[0]` is lag 1.
#[derive(Debug, Clone, PartialEq)]
pub struct AcfVector(Vec<f64>);

impl AcfVector {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn lags(&self) -> usize {
        self.0.len()
    }

    /// Value at 1-based lag `l`.
    pub fn lag(&self, l: usize) -> f64 {
        self.0[l - 1]
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }
}

fn check_lags(n: usize, lags: usize) -> Result<()> {
    if lags == 0 {
        return Err(Error::Config("lag count must be positive".into()));
    }
    if lags >= n {
        return Err(Error::Config(alloc::format!("lag count {lags} must be smaller than series length {n}")));
    }
    Ok(())
}

/// Two-pass per-lag Pearson correlation between `x[..n-l]` and `x[l..]`.
pub fn acf_scratch(x: &[f64], lags: usize) -> Result<AcfVector> {
    check_lags(x.len(), lags)?;
    let n = x.len();
    let mut out = Vec::with_capacity(lags);
    for l in 1..=lags {
        let a = &x[..n - l];
        let b = &x[l..];
        let m = (n - l) as f64;
        let ma = a.iter().sum::<f64>() / m;
        let mb = b.iter().sum::<f64>() / m;
        let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
        for (p, q) in a.iter().zip(b) {
            let (da, db) = (p - ma, q - mb);
            cov += da * db;
            va += da * da;
            vb += db * db;
        }
        if va <= 0.0 || vb <= 0.0 {
            return Err(Error::DegenerateAcf { lag: l });
        }
        out.push(cov / sqrt(va * vb));
    }
    Ok(AcfVector(out))
}

/// Partial autocorrelation `φ_{l,l}` via the Durbin-Levinson recursion.
pub fn pacf_from_acf(rho: &AcfVector) -> Result<AcfVector> {
    let mut out = vec![0.0; rho.lags()];
    pacf_into(rho.values(), &mut out)?;
    Ok(AcfVector(out))
}

/// Denominators below this are treated as a singular recursion step.
const DL_SINGULAR: f64 = 1e-12;

/// PACF of `rho` written into `out` (same length).
pub fn pacf_into(rho: &[f64], out: &mut [f64]) -> Result<()> {
    let lags = rho.len();
    if lags == 0 {
        return Err(Error::Config("empty ACF".into()));
    }
    // phi[k] holds φ_{l-1,k+1} at the start of step l.
    let mut phi = vec![0.0; lags];
    let mut next = vec![0.0; lags];
    phi[0] = rho[0];
    out[0] = rho[0];
    for l in 2..=lags {
        let mut num = rho[l - 1];
        let mut den = 1.0;
        for k in 1..l {
            num -= phi[k - 1] * rho[l - k - 1];
            den -= phi[k - 1] * rho[k - 1];
        }
        if !(abs(den) >= DL_SINGULAR) {
            return Err(Error::SingularRecursion { lag: l });
        }
        let pll = num / den;
        if !pll.is_finite() {
            return Err(Error::SingularRecursion { lag: l });
        }
        for k in 1..l {
            next[k - 1] = phi[k - 1] - pll * phi[l - k - 1];
        }
        next[l - 1] = pll;
        phi[..l].copy_from_slice(&next[..l]);
        out[l - 1] = pll;
    }
    Ok(())
}

/// The five per-lag running sums behind the ACF.
#[derive(Debug, Clone, PartialEq)]
pub struct AcfAggregates {
    len: usize,
    shift: f64,
    /// Σ over the leading window.
    sx: Vec<f64>,
    /// Σ over the lagged window.
    sx_lag: Vec<f64>,
    sx2: Vec<f64>,
    sx2_lag: Vec<f64>,
    sxx: Vec<f64>,
}

/// Per-lag change of the five sums, in field order.
#[derive(Debug, Default, Clone, Copy)]
struct LagDelta {
    sx: f64,
    sx_lag: f64,
    sx2: f64,
    sx2_lag: f64,
    sxx: f64,
}

impl AcfAggregates {
    /// Plain (unshifted) sums over `x`.
    pub fn extract(x: &[f64], lags: usize) -> Result<Self> {
        Self::extract_shifted(x, lags, 0.0)
    }

    /// Sums over `x - shift`.
    pub fn extract_shifted(x: &[f64], lags: usize, shift: f64) -> Result<Self> {
        check_lags(x.len(), lags)?;
        Ok(Self::extract_bounded(x, lags, shift, 0..x.len()))
    }

    /// Sums restricted to positions in `range`: single-position sums count
    /// `t ∈ range` that belong to the respective window of the full series,
    /// and the cross sum counts pairs `(t, t + l)` with both ends in `range`.
    ///
    /// Summing this over a partition of `[0, N)` gives the global sums except
    /// for the cross terms of pairs that straddle a boundary.
    pub fn extract_bounded(x: &[f64], lags: usize, shift: f64, range: Range<usize>) -> Self {
        let n = x.len();
        let mut agg = Self {
            len: n,
            shift,
            sx: vec![0.0; lags],
            sx_lag: vec![0.0; lags],
            sx2: vec![0.0; lags],
            sx2_lag: vec![0.0; lags],
            sxx: vec![0.0; lags],
        };
        for l in 1..=lags {
            let (mut sx, mut sxl, mut sx2, mut sx2l, mut sxx) = (0.0, 0.0, 0.0, 0.0, 0.0);
            for t in range.clone() {
                let v = x[t] - shift;
                if t + l < n {
                    sx += v;
                    sx2 += v * v;
                }
                if t >= l {
                    sxl += v;
                    sx2l += v * v;
                }
                if t + l < range.end {
                    sxx += v * (x[t + l] - shift);
                }
            }
            agg.sx[l - 1] = sx;
            agg.sx_lag[l - 1] = sxl;
            agg.sx2[l - 1] = sx2;
            agg.sx2_lag[l - 1] = sx2l;
            agg.sxx[l - 1] = sxx;
        }
        agg
    }

    pub fn lags(&self) -> usize {
        self.sx.len()
    }

    /// Effective series length `N`.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn sx(&self) -> &[f64] {
        &self.sx
    }
    pub fn sx_lag(&self) -> &[f64] {
        &self.sx_lag
    }
    pub fn sx2(&self) -> &[f64] {
        &self.sx2
    }
    pub fn sx2_lag(&self) -> &[f64] {
        &self.sx2_lag
    }
    pub fn sxx(&self) -> &[f64] {
        &self.sxx
    }

    /// Adds `other` lag by lag. Both must share length, lag count and shift.
    pub fn merge(&mut self, other: &Self) {
        debug_assert_eq!(self.len, other.len);
        debug_assert_eq!(self.shift, other.shift);
        for l in 0..self.lags() {
            self.sx[l] += other.sx[l];
            self.sx_lag[l] += other.sx_lag[l];
            self.sx2[l] += other.sx2[l];
            self.sx2_lag[l] += other.sx2_lag[l];
            self.sxx[l] += other.sxx[l];
        }
    }

    /// Adds extra cross-product contributions, one per lag.
    pub fn add_cross(&mut self, extra: &[f64]) {
        for (s, e) in self.sxx.iter_mut().zip(extra) {
            *s += e;
        }
    }

    /// ACF from the stored sums, `O(L)`.
    pub fn get_acf(&self) -> Result<AcfVector> {
        let mut out = vec![0.0; self.lags()];
        self.acf_into(&mut out)?;
        Ok(AcfVector(out))
    }

    pub fn acf_into(&self, out: &mut [f64]) -> Result<()> {
        for l in 1..=self.lags() {
            out[l - 1] = self.rho(l, LagDelta::default())?;
        }
        Ok(())
    }

    fn rho(&self, l: usize, d: LagDelta) -> Result<f64> {
        let i = l - 1;
        let cnt = (self.len - l) as f64;
        let sx = self.sx[i] + d.sx;
        let sxl = self.sx_lag[i] + d.sx_lag;
        let sx2 = self.sx2[i] + d.sx2;
        let sx2l = self.sx2_lag[i] + d.sx2_lag;
        let sxx = self.sxx[i] + d.sxx;
        let va = cnt * sx2 - sx * sx;
        let vb = cnt * sx2l - sxl * sxl;
        // Relative test: the variance must survive the cancellation in
        // `cnt·Σx² − (Σx)²`.
        if !(va > DEGENERATE_REL * cnt * sx2) || !(vb > DEGENERATE_REL * cnt * sx2l) {
            return Err(Error::DegenerateAcf { lag: l });
        }
        Ok((cnt * sxx - sx * sxl) / sqrt(va * vb))
    }

    /// Sum changes for lag `l` when `x[start + j] += deltas[j]`, counting
    /// only positions and pairs inside `range`. `x` holds pre-edit values.
    fn lag_delta(&self, x: &[f64], start: usize, deltas: &[f64], l: usize, range: &Range<usize>) -> LagDelta {
        let n = self.len;
        let c = self.shift;
        let end = start + deltas.len();
        let mut d = LagDelta::default();
        for (j, &dk) in deltas.iter().enumerate() {
            let k = start + j;
            if dk == 0.0 || !range.contains(&k) {
                continue;
            }
            let sq = dk * (2.0 * (x[k] - c) + dk);
            if k + l < n {
                d.sx += dk;
                d.sx2 += sq;
            }
            if k >= l {
                d.sx_lag += dk;
                d.sx2_lag += sq;
            }
            let up = k + l;
            if up < range.end {
                d.sxx += dk * (x[up] - c);
                if up < end {
                    d.sxx += dk * deltas[up - start];
                }
            }
            if k >= range.start + l {
                d.sxx += dk * (x[k - l] - c);
            }
        }
        d
    }

    /// One-point edit `x[i] += delta`. Equivalent to a one-element
    /// [`apply_multi_delta`](Self::apply_multi_delta).
    pub fn apply_single_delta(&mut self, x: &[f64], i: usize, delta: f64) {
        self.apply_multi_delta(x, i, &[delta]);
    }

    /// Contiguous edit `x[start + j] += deltas[j]`, `O(mL)`. `x` holds the
    /// values before the edit.
    pub fn apply_multi_delta(&mut self, x: &[f64], start: usize, deltas: &[f64]) {
        self.apply_multi_delta_bounded(x, start, deltas, 0..self.len);
    }

    /// Like [`apply_multi_delta`](Self::apply_multi_delta) for sums built
    /// with [`extract_bounded`](Self::extract_bounded) over `range`.
    pub fn apply_multi_delta_bounded(&mut self, x: &[f64], start: usize, deltas: &[f64], range: Range<usize>) {
        for l in 1..=self.lags() {
            let d = self.lag_delta(x, start, deltas, l, &range);
            let i = l - 1;
            self.sx[i] += d.sx;
            self.sx_lag[i] += d.sx_lag;
            self.sx2[i] += d.sx2;
            self.sx2_lag[i] += d.sx2_lag;
            self.sxx[i] += d.sxx;
        }
    }

    /// ACF the sums would give after the edit, without mutating them.
    pub fn acf_with_edit(&self, x: &[f64], start: usize, deltas: &[f64], out: &mut [f64]) -> Result<()> {
        let range = 0..self.len;
        for l in 1..=self.lags() {
            let d = self.lag_delta(x, start, deltas, l, &range);
            out[l - 1] = self.rho(l, d)?;
        }
        Ok(())
    }

    /// Largest relative difference to `other` across all sums.
    pub fn max_rel_diff(&self, other: &Self) -> f64 {
        let pairs = [
            (&self.sx, &other.sx),
            (&self.sx_lag, &other.sx_lag),
            (&self.sx2, &other.sx2),
            (&self.sx2_lag, &other.sx2_lag),
            (&self.sxx, &other.sxx),
        ];
        let mut worst: f64 = 0.0;
        for (a, b) in pairs {
            for (p, q) in a.iter().zip(b.iter()) {
                let scale = abs(*p).max(abs(*q)).max(1.0);
                worst = worst.max(abs(p - q) / scale);
            }
        }
        worst
    }
}

const DEGENERATE_REL: f64 = 1e-13;
