use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use super::{CompressorConfig, StopMode};
use crate::acf::{pacf_into, AcfAggregates};
use crate::error::{Error, Result};
use crate::heap::IndexedMinHeap;
use crate::math::abs;
use crate::measure::measure;
use crate::report::CompressionReport;
use crate::series::{interpolate, reconstruct_from_kept, CompressedSeries, KeptPoint, StatKind};
use crate::window::{window_aggregate, WindowAggregates, WindowEdit};

const NONE: usize = usize::MAX;

/// Computes heap keys for a batch of points against a shared engine state.
///
/// Implementations must return exactly [`Engine::key`] for each point; only
/// the scheduling may differ.
pub trait ImpactEvaluator: Send + Sync {
    fn evaluate(&self, engine: &Engine, points: &[usize], out: &mut [f64]);
}

#[derive(Debug, Clone, Copy, Default)]
pub struct Sequential;

impl ImpactEvaluator for Sequential {
    fn evaluate(&self, engine: &Engine, points: &[usize], out: &mut [f64]) {
        for (p, o) in points.iter().zip(out.iter_mut()) {
            *o = engine.key(*p);
        }
    }
}

/// Order in which candidates are tried. Whatever the order, a removal is only
/// committed while the statistic stays within the bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Ranking {
    /// Statistic deviation the removal would cause.
    #[default]
    Impact,
    /// Triangle area spanned with the two surviving neighbors, time on the
    /// x axis (Visvalingam-Whyatt).
    Area,
    /// Sum of `|x_k − x̂_k|` over the points the removal would bridge.
    BridgeSum,
    /// Mean of `|x_k − x̂_k|` over the points the removal would bridge.
    BridgeMean,
}

impl Ranking {
    pub fn method_name(self) -> &'static str {
        match self {
            Ranking::Impact => "cameo",
            Ranking::Area => "vw",
            Ranking::BridgeSum => "tps",
            Ranking::BridgeMean => "tpm",
        }
    }
}

/// What one call to [`Engine::step`] did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Step {
    Removed(usize),
    /// The cheapest removal would reach the error bound.
    BoundReached,
    TargetReached,
    /// No removable point with a defined impact is left.
    Exhausted,
}

/// The last committed removal.
#[derive(Debug, Clone, PartialEq)]
pub struct CommitRecord {
    pub index: usize,
    /// First re-interpolated raw position, `left(index) + 1`.
    pub span_start: usize,
    pub before: Vec<f64>,
    pub after: Vec<f64>,
    /// The same change in statistic space.
    pub window_edit: WindowEdit,
}

/// State of one greedy removal run.
///
/// Holds the original and reconstructed series, the surviving-neighbor
/// chain, the impact heap, window aggregates and the running ACF sums over
/// them. Points outside the removable set stay alive throughout.
pub struct Engine {
    cfg: CompressorConfig,
    original: Vec<f64>,
    recon: Vec<f64>,
    alive: Vec<bool>,
    left: Vec<usize>,
    right: Vec<usize>,
    heap: IndexedMinHeap,
    /// Removal count at which each queued key was computed.
    key_epoch: Vec<usize>,
    windows: WindowAggregates,
    aggs: AcfAggregates,
    reference: Vec<f64>,
    hops: usize,
    ranking: Ranking,
    alive_count: usize,
    removed: Vec<usize>,
    last: Option<CommitRecord>,
    deviation: f64,
    drift_every: usize,
    max_drift: Option<f64>,
    evaluator: Arc<dyn ImpactEvaluator>,
}

impl Engine {
    pub fn new(values: &[f64], cfg: CompressorConfig) -> Result<Self> {
        Self::with_evaluator(values, cfg, Arc::new(Sequential))
    }

    pub fn with_evaluator(values: &[f64], cfg: CompressorConfig, evaluator: Arc<dyn ImpactEvaluator>) -> Result<Self> {
        let n = values.len();
        let alive = vec![true; n];
        let removable: Vec<bool> = (0..n).map(|i| i > 0 && i + 1 < n).collect();
        Self::from_state(values, alive, &removable, None, cfg, Ranking::Impact, evaluator)
    }

    /// Starts from a partially compressed state.
    ///
    /// `alive` marks surviving points of `values` (both endpoints must be
    /// alive); only points with `removable[i]` set are candidates. `aggs`, if
    /// given, must equal the sums over the window aggregates of the current
    /// reconstruction, shifted by the mean of the original's window
    /// aggregates (see [`Engine::shift_for`]).
    ///
    /// With a geometric `ranking` only the two adjacent keys can change after
    /// a removal, so re-ranking is limited to one hop.
    pub fn from_state(
        values: &[f64],
        alive: Vec<bool>,
        removable: &[bool],
        aggs: Option<AcfAggregates>,
        cfg: CompressorConfig,
        ranking: Ranking,
        evaluator: Arc<dyn ImpactEvaluator>,
    ) -> Result<Self> {
        let n = values.len();
        if n < 2 {
            return Err(Error::TooShort(n));
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { index });
        }
        if alive.len() != n || removable.len() != n {
            return Err(Error::LengthMismatch { left: n, right: alive.len().min(removable.len()) });
        }
        if !alive[0] || !alive[n - 1] {
            return Err(Error::Config("endpoints must be kept".into()));
        }
        cfg.validate(n)?;

        let orig_windows = window_aggregate(values, cfg.window, cfg.agg)?;
        let shift = mean(orig_windows.values());
        let reference_aggs = AcfAggregates::extract_shifted(orig_windows.values(), cfg.lags, shift)?;
        let mut reference = reference_aggs.get_acf()?.into_inner();
        if cfg.stat == StatKind::Pacf {
            let acf = reference.clone();
            pacf_into(&acf, &mut reference)?;
        }
        // Surface metric errors that depend only on the reference (zero range
        // for NRMSE, zero entries for MAPE) before the run starts.
        measure(cfg.metric, &reference, &reference)?;

        let kept: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
        let recon = reconstruct_from_kept(values, &kept);
        let windows = window_aggregate(&recon, cfg.window, cfg.agg)?;
        let aggs = match aggs {
            Some(a) => {
                if a.lags() != cfg.lags || a.len() != windows.len() {
                    return Err(Error::Config("aggregates do not match the configuration".into()));
                }
                a
            }
            None if kept.len() == n => reference_aggs,
            None => AcfAggregates::extract_shifted(windows.values(), cfg.lags, shift)?,
        };

        let mut left = vec![NONE; n];
        let mut right = vec![NONE; n];
        for w in kept.windows(2) {
            right[w[0]] = w[1];
            left[w[1]] = w[0];
        }

        let mut engine = Self {
            hops: if ranking == Ranking::Impact { cfg.hops.resolve(n, cfg.window) } else { 1 },
            ranking,
            cfg,
            original: values.to_vec(),
            recon,
            alive,
            left,
            right,
            heap: IndexedMinHeap::new(n),
            key_epoch: vec![0; n],
            windows,
            aggs,
            reference,
            alive_count: kept.len(),
            removed: Vec::new(),
            last: None,
            deviation: 0.0,
            drift_every: n.div_ceil(10).max(1),
            max_drift: None,
            evaluator,
        };
        engine.deviation = engine.current_deviation();
        let candidates: Vec<usize> = (1..n.saturating_sub(1)).filter(|&i| engine.alive[i] && removable[i]).collect();
        let mut impacts = vec![0.0; candidates.len()];
        engine.evaluator.evaluate(&engine, &candidates, &mut impacts);
        engine.heap = IndexedMinHeap::from_items(n, candidates.into_iter().zip(impacts));
        Ok(engine)
    }

    /// Shift used for the running sums: the mean of the window aggregates
    /// of the original series.
    pub fn shift_for(values: &[f64], cfg: &CompressorConfig) -> Result<f64> {
        Ok(mean(window_aggregate(values, cfg.window, cfg.agg)?.values()))
    }

    pub fn config(&self) -> &CompressorConfig {
        &self.cfg
    }

    pub fn original(&self) -> &[f64] {
        &self.original
    }

    pub fn reconstruction(&self) -> &[f64] {
        &self.recon
    }

    pub fn windows(&self) -> &WindowAggregates {
        &self.windows
    }

    pub fn aggregates(&self) -> &AcfAggregates {
        &self.aggs
    }

    /// The statistic of the original series, lags `1..=L`.
    pub fn reference(&self) -> &[f64] {
        &self.reference
    }

    pub fn is_alive(&self, i: usize) -> bool {
        self.alive[i]
    }

    pub fn alive_mask(&self) -> &[bool] {
        &self.alive
    }

    pub fn kept_len(&self) -> usize {
        self.alive_count
    }

    pub fn kept(&self) -> Vec<usize> {
        (0..self.original.len()).filter(|&i| self.alive[i]).collect()
    }

    /// Removed points in removal order.
    pub fn removed(&self) -> &[usize] {
        &self.removed
    }

    pub fn last_commit(&self) -> Option<&CommitRecord> {
        self.last.as_ref()
    }

    /// Deviation of the current state from the reference, from the running
    /// sums.
    pub fn deviation(&self) -> f64 {
        self.deviation
    }

    pub fn hops(&self) -> usize {
        self.hops
    }

    pub fn max_drift(&self) -> Option<f64> {
        self.max_drift
    }

    /// Impact currently queued for `i`, or `+inf` if `i` is not a candidate.
    pub fn queued_impact(&self, i: usize) -> f64 {
        if self.heap.contains(i) {
            self.heap.key(i)
        } else {
            f64::INFINITY
        }
    }

    pub fn is_candidate(&self, i: usize) -> bool {
        self.heap.contains(i)
    }

    /// Statistic from the running sums.
    pub fn current_stat(&self) -> Result<Vec<f64>> {
        let mut out = self.aggs.get_acf()?.into_inner();
        if self.cfg.stat == StatKind::Pacf {
            let acf = out.clone();
            pacf_into(&acf, &mut out)?;
        }
        Ok(out)
    }

    fn current_deviation(&self) -> f64 {
        match self.current_stat() {
            Ok(s) => measure(self.cfg.metric, &self.reference, &s).unwrap_or(f64::INFINITY),
            Err(_) => f64::INFINITY,
        }
    }

    /// Values the span `(left(i), right(i))` takes once `i` is removed.
    fn bridge(&self, i: usize) -> (usize, Vec<f64>) {
        let (l, r) = (self.left[i], self.right[i]);
        let (lv, rv) = (self.recon[l], self.recon[r]);
        (l + 1, (l + 1..r).map(|k| interpolate(l, lv, r, rv, k)).collect())
    }

    fn deviation_after(&self, edit: &WindowEdit) -> f64 {
        let lags = self.cfg.lags;
        let mut stat = vec![0.0; lags];
        if self.aggs.acf_with_edit(self.windows.values(), edit.first, &edit.deltas, &mut stat).is_err() {
            return f64::INFINITY;
        }
        if self.cfg.stat == StatKind::Pacf {
            let acf = stat.clone();
            if pacf_into(&acf, &mut stat).is_err() {
                return f64::INFINITY;
            }
        }
        match measure(self.cfg.metric, &self.reference, &stat) {
            Ok(d) if d.is_finite() => d,
            _ => f64::INFINITY,
        }
    }

    /// Deviation from the reference if `i` were removed now; `+inf` when the
    /// resulting statistic is undefined. `i` must be alive and interior.
    pub fn impact(&self, i: usize) -> f64 {
        let (start, new) = self.bridge(i);
        let edit = self.windows.edit(&self.recon, start, &new);
        self.deviation_after(&edit)
    }

    /// Heap key of `i` under the engine's ranking.
    pub fn key(&self, i: usize) -> f64 {
        match self.ranking {
            Ranking::Impact => self.impact(i),
            Ranking::Area => {
                let (l, r) = (self.left[i], self.right[i]);
                let (xl, xi, xr) = (self.recon[l], self.recon[i], self.recon[r]);
                0.5 * abs((i - l) as f64 * (xr - xl) - (r - l) as f64 * (xi - xl))
            }
            Ranking::BridgeSum | Ranking::BridgeMean => {
                let (start, new) = self.bridge(i);
                let sum = crate::math::compensated_sum(
                    new.iter().enumerate().map(|(j, v)| abs(self.original[start + j] - v)),
                );
                if self.ranking == Ranking::BridgeSum {
                    sum
                } else {
                    sum / new.len() as f64
                }
            }
        }
    }

    /// Pops the cheapest candidate and commits its removal unless a stopping
    /// condition holds first.
    pub fn step(&mut self) -> Result<Step> {
        let n = self.original.len();
        if let StopMode::TargetRatio(c) = self.cfg.mode {
            if n as f64 / self.alive_count as f64 >= c {
                return Ok(Step::TargetReached);
            }
        }
        let refresh = self.cfg.refresh_stale && self.ranking == Ranking::Impact;
        let (i, start, new, edit, d) = loop {
            let Some((i, _)) = self.heap.peek() else {
                return Ok(Step::Exhausted);
            };
            let (start, new) = self.bridge(i);
            let edit = self.windows.edit(&self.recon, start, &new);
            let d = self.deviation_after(&edit);
            if refresh && self.key_epoch[i] != self.removed.len() {
                self.heap.update(i, d);
                self.key_epoch[i] = self.removed.len();
                continue;
            }
            break (i, start, new, edit, d);
        };
        match self.cfg.mode {
            StopMode::ErrorBound => {
                if !(d < self.cfg.epsilon) {
                    return Ok(Step::BoundReached);
                }
            }
            StopMode::TargetRatio(_) => {
                if !d.is_finite() {
                    return Ok(Step::Exhausted);
                }
            }
        }
        self.commit(i, start, new, edit, d);
        Ok(Step::Removed(i))
    }

    fn commit(&mut self, i: usize, start: usize, new: Vec<f64>, edit: WindowEdit, d: f64) {
        self.heap.remove(i);
        self.aggs.apply_multi_delta(self.windows.values(), edit.first, &edit.deltas);
        self.windows.apply(&edit);
        let end = start + new.len();
        let before = self.recon[start..end].to_vec();
        self.recon[start..end].copy_from_slice(&new);
        let (l, r) = (self.left[i], self.right[i]);
        self.right[l] = r;
        self.left[r] = l;
        self.alive[i] = false;
        self.alive_count -= 1;
        self.removed.push(i);
        self.deviation = d;
        self.last = Some(CommitRecord { index: i, span_start: start, before, after: new, window_edit: edit });
        self.reheap(l, r);
        if self.cfg.drift_check && self.removed.len().is_multiple_of(self.drift_every) {
            self.check_drift();
        }
    }

    /// Re-ranks up to `h` surviving points on each side of a removal whose
    /// anchors were `l` and `r`.
    fn reheap(&mut self, l: usize, r: usize) {
        if self.hops == 0 {
            return;
        }
        let mut points = Vec::with_capacity(2 * self.hops.min(self.alive_count));
        let mut p = l;
        for _ in 0..self.hops {
            if p == NONE {
                break;
            }
            if self.heap.contains(p) {
                points.push(p);
            }
            p = self.left[p];
        }
        let mut p = r;
        for _ in 0..self.hops {
            if p == NONE {
                break;
            }
            if self.heap.contains(p) {
                points.push(p);
            }
            p = self.right[p];
        }
        let mut impacts = vec![0.0; points.len()];
        self.evaluator.evaluate(self, &points, &mut impacts);
        let epoch = self.removed.len();
        for (p, k) in points.into_iter().zip(impacts) {
            if k.to_bits() != self.heap.key(p).to_bits() {
                self.heap.update(p, k);
            }
            self.key_epoch[p] = epoch;
        }
    }

    fn check_drift(&mut self) {
        let fresh = match AcfAggregates::extract_shifted(self.windows.values(), self.cfg.lags, self.aggs.shift()) {
            Ok(a) => a,
            Err(_) => return,
        };
        let (Ok(a), Ok(b)) = (self.aggs.get_acf(), fresh.get_acf()) else {
            return;
        };
        let gap = a.values().iter().zip(b.values()).map(|(p, q)| abs(p - q)).fold(0.0, f64::max);
        self.max_drift = Some(self.max_drift.map_or(gap, |m| m.max(gap)));
    }

    /// Steps until a stopping condition.
    pub fn run(&mut self) -> Result<Step> {
        loop {
            match self.step()? {
                Step::Removed(_) => {}
                other => return Ok(other),
            }
        }
    }

    /// Verifies the result from scratch and packages it.
    ///
    /// In error-bound mode, removals are undone newest first until the
    /// scratch deviation is below `epsilon`. This only triggers if the running
    /// sums disagreed with the scratch value right at the boundary.
    pub fn finish(self) -> Result<(CompressedSeries, CompressionReport)> {
        let n = self.original.len();
        let stat = self.cfg.stat_config();
        let mut alive = self.alive.clone();
        let mut removed = self.removed.clone();
        let mut rolled_back = 0usize;
        loop {
            let kept: Vec<usize> = (0..n).filter(|&i| alive[i]).collect();
            let recon = reconstruct_from_kept(&self.original, &kept);
            let bpv = 64.0 * kept.len() as f64 / n as f64;
            let mut report = CompressionReport::assess(
                self.ranking.method_name(),
                &self.original,
                &recon,
                &stat,
                self.cfg.metric,
                self.cfg.epsilon,
                bpv,
            )?;
            match self.cfg.mode {
                StopMode::ErrorBound => {
                    if kept.len() == n {
                        // Nothing removed: the reconstruction is the input.
                        report.verification.passed = true;
                    }
                    if !report.verification.passed {
                        if let Some(last) = removed.pop() {
                            alive[last] = true;
                            rolled_back += 1;
                            continue;
                        }
                    }
                }
                StopMode::TargetRatio(c) => {
                    if report.cr < c {
                        return Err(Error::TargetUnreachable { target: c, achieved: report.cr });
                    }
                    report.verification.passed = true;
                }
            }
            report.removals = removed.len();
            report.max_drift = self.max_drift;
            if rolled_back > 0 {
                report.note = Some(format!("{rolled_back} removal(s) undone by the final check"));
            }
            let cs = CompressedSeries {
                kept: kept.iter().map(|&i| KeptPoint { index: i as u64 + 1, value: self.original[i] }).collect(),
                original_length: n as u64,
                stat: self.cfg.stat,
                lags: self.cfg.lags as u32,
                window: self.cfg.window as u32,
                agg: self.cfg.agg,
                epsilon: self.cfg.epsilon,
                metric: self.cfg.metric,
            };
            return Ok((cs, report));
        }
    }
}

fn mean(x: &[f64]) -> f64 {
    crate::math::compensated_sum(x.iter().copied()) / x.len() as f64
}
