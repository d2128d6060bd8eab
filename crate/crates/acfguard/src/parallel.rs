//! Two multi-threaded drivers for the compressor.
//!
//! *Fine-grained*: one removal stream, with the neighbor re-ranking after
//! each removal split across a thread pool. Output is identical to the
//! single-threaded run.
//!
//! *Coarse-grained*: the series is cut into `T` consecutive chunks. Each
//! worker removes points from its own chunk against a local budget `p·ε/T`,
//! seeing only its own edits. At the barrier the per-chunk sums and the
//! cross-boundary terms are merged into the global sums, and a single stream
//! continues under the full `ε`.

use std::ops::Range;
use std::sync::{Arc, Mutex};

use acfguard_core::acf::{pacf_into, AcfAggregates};
use acfguard_core::cameo::{compress, Engine, ImpactEvaluator, Ranking, Sequential, Step};
use acfguard_core::window::window_aggregate;
use acfguard_core::{
    measure, CompressedSeries, CompressionReport, CompressorConfig, Error, Result, StatKind, StopMode, TimeSeries,
};
use rayon::prelude::*;

/// Splits re-ranking across a dedicated pool in static contiguous chunks.
pub struct FineEvaluator {
    pool: rayon::ThreadPool,
    threads: usize,
}

impl FineEvaluator {
    pub fn new(threads: usize) -> Result<Self> {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
        Ok(Self { pool, threads })
    }
}

impl ImpactEvaluator for FineEvaluator {
    fn evaluate(&self, engine: &Engine, points: &[usize], out: &mut [f64]) {
        if points.len() < 2 || self.threads == 1 {
            return Sequential.evaluate(engine, points, out);
        }
        let chunk = points.len().div_ceil(self.threads);
        self.pool.install(|| {
            points
                .par_chunks(chunk)
                .zip(out.par_chunks_mut(chunk))
                .for_each(|(p, o)| Sequential.evaluate(engine, p, o));
        });
    }
}

/// Single removal stream with re-ranking spread over `threads` workers.
pub fn compress_fine(
    series: &TimeSeries,
    cfg: CompressorConfig,
    threads: usize,
) -> Result<(CompressedSeries, CompressionReport)> {
    if threads == 0 {
        return Err(Error::Config("thread count must be positive".into()));
    }
    let h = cfg.hops.resolve(series.len(), cfg.window);
    if h < threads {
        return Err(Error::Config(format!("hops {h} must be at least the fine thread count {threads}")));
    }
    if threads == 1 {
        return compress(series, cfg);
    }
    acfguard_core::cameo::compress_with(series, cfg, Arc::new(FineEvaluator::new(threads)?))
}

/// Chunking of the statistic-space series (window aggregates, or the raw
/// samples when not aggregating) plus the initial sums per chunk and per
/// chunk boundary.
#[derive(Debug, Clone)]
pub struct PartitionPlan {
    /// `T + 1` increasing positions, first 0, last the statistic length.
    pub boundaries: Vec<usize>,
    pub budget_fraction: f64,
    pub local_budget: f64,
    pub lags: usize,
    pub shift: f64,
    /// Sums restricted to each chunk.
    pub chunk_aggs: Vec<AcfAggregates>,
    /// Per boundary `b` and lag `l`: `Σ (x_t − c)(x_{t+l} − c)` over pairs
    /// with `t < b <= t + l`.
    pub overlaps: Vec<Vec<f64>>,
}

impl PartitionPlan {
    pub fn threads(&self) -> usize {
        self.boundaries.len() - 1
    }

    pub fn chunk(&self, i: usize) -> Range<usize> {
        self.boundaries[i]..self.boundaries[i + 1]
    }

    /// Global sums: chunk sums plus cross-boundary terms.
    pub fn merged(&self) -> AcfAggregates {
        merge(&self.chunk_aggs, &self.overlaps)
    }
}

fn merge(chunks: &[AcfAggregates], overlaps: &[Vec<f64>]) -> AcfAggregates {
    let mut total = chunks[0].clone();
    for c in &chunks[1..] {
        total.merge(c);
    }
    for o in overlaps {
        total.add_cross(o);
    }
    total
}

/// Cross terms at boundary `b` from `buf = x[b − L .. b + L]`.
fn boundary_cross(buf: &[f64], lags: usize, shift: f64) -> Vec<f64> {
    (1..=lags).map(|l| (lags - l..lags).map(|t| (buf[t] - shift) * (buf[t + l] - shift)).sum()).collect()
}

pub fn plan_partitions(
    series: &TimeSeries,
    cfg: &CompressorConfig,
    threads: usize,
    budget_fraction: f64,
) -> Result<PartitionPlan> {
    cfg.validate(series.len())?;
    if threads == 0 {
        return Err(Error::Config("thread count must be positive".into()));
    }
    if !(budget_fraction > 0.0 && budget_fraction <= 1.0) {
        return Err(Error::Config(format!("budget fraction must be in (0, 1], got {budget_fraction}")));
    }
    let windows = window_aggregate(series.values(), cfg.window, cfg.agg)?;
    let x = windows.values();
    let n = x.len();
    let lags = cfg.lags;
    if n < threads * (2 * lags + 4) {
        return Err(Error::Config(format!(
            "series of effective length {n} too short for {threads} chunks at {lags} lags (need {})",
            threads * (2 * lags + 4)
        )));
    }
    let size = n / threads;
    let mut boundaries: Vec<usize> = (0..threads).map(|i| i * size).collect();
    boundaries.push(n);
    let shift = Engine::shift_for(series.values(), cfg)?;
    let chunk_aggs = (0..threads)
        .map(|i| AcfAggregates::extract_bounded(x, lags, shift, boundaries[i]..boundaries[i + 1]))
        .collect();
    let overlaps =
        boundaries[1..threads].iter().map(|&b| boundary_cross(&x[b - lags..b + lags], lags, shift)).collect();
    Ok(PartitionPlan {
        boundaries,
        budget_fraction,
        local_budget: budget_fraction * cfg.epsilon / threads as f64,
        lags,
        shift,
        chunk_aggs,
        overlaps,
    })
}

/// Cross terms at one chunk boundary, shared by the two adjacent workers.
struct Overlap {
    boundary: usize,
    buf: Vec<f64>,
    cross: Vec<f64>,
}

impl Overlap {
    /// Writes `values` at statistic positions `first..` into the boundary
    /// buffer where they fall inside it, then recomputes the cross terms.
    fn update(&mut self, first: usize, values: &[f64], lags: usize, shift: f64) {
        let lo = self.boundary - lags;
        let mut touched = false;
        for (j, v) in values.iter().enumerate() {
            let p = first + j;
            if (lo..self.boundary + lags).contains(&p) {
                self.buf[p - lo] = *v;
                touched = true;
            }
        }
        if touched {
            self.cross = boundary_cross(&self.buf, lags, shift);
        }
    }
}

struct WorkerResult {
    removed: Vec<usize>,
    aggs: AcfAggregates,
}

/// Details of a coarse run beyond the compressed output.
#[derive(Debug, Clone)]
pub struct CoarseOutcome {
    pub compressed: CompressedSeries,
    pub report: CompressionReport,
    /// Removals per worker in the local phase, after any fallback truncation.
    pub local_removals: Vec<usize>,
    /// Fraction of each worker's removal list kept at the merge (1 unless the
    /// merged state broke the bound).
    pub kept_fraction: f64,
    /// Largest relative gap between the merged sums and a fresh extraction
    /// over the merged reconstruction.
    pub merge_gap: f64,
}

pub fn compress_coarse(
    series: &TimeSeries,
    cfg: CompressorConfig,
    threads: usize,
    budget_fraction: f64,
) -> Result<(CompressedSeries, CompressionReport)> {
    compress_coarse_detailed(series, cfg, threads, budget_fraction).map(|o| (o.compressed, o.report))
}

pub fn compress_coarse_detailed(
    series: &TimeSeries,
    cfg: CompressorConfig,
    threads: usize,
    budget_fraction: f64,
) -> Result<CoarseOutcome> {
    if cfg.mode != StopMode::ErrorBound {
        return Err(Error::Config("the coarse strategy supports error-bound mode only".into()));
    }
    let plan = plan_partitions(series, &cfg, threads, budget_fraction)?;
    if threads == 1 {
        let (compressed, report) = compress(series, cfg)?;
        return Ok(CoarseOutcome { local_removals: vec![0], kept_fraction: 1.0, merge_gap: 0.0, compressed, report });
    }

    let x = series.values();
    let n = x.len();
    let k = cfg.window;
    let lags = cfg.lags;
    let global_initial = plan.merged();
    let stat_values = window_aggregate(x, cfg.window, cfg.agg)?.values().to_vec();
    let overlaps: Vec<Mutex<Overlap>> = plan.boundaries[1..threads]
        .iter()
        .zip(&plan.overlaps)
        .map(|(&b, cross)| {
            Mutex::new(Overlap { boundary: b, buf: stat_values[b - lags..b + lags].to_vec(), cross: cross.clone() })
        })
        .collect();
    let mut local_cfg = cfg;
    local_cfg.epsilon = plan.local_budget;

    let results: Vec<Result<WorkerResult>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|i| {
                let plan = &plan;
                let overlaps = &overlaps;
                let global_initial = &global_initial;
                let stat_values = &stat_values;
                s.spawn(move || -> Result<WorkerResult> {
                    let chunk = plan.chunk(i);
                    let raw_lo = chunk.start * k;
                    let raw_hi = if i + 1 == threads { n } else { chunk.end * k };
                    // chunk boundary samples stay as interpolation anchors
                    let removable: Vec<bool> = (0..n).map(|t| t > raw_lo && t + 1 < raw_hi).collect();
                    let mut engine = Engine::from_state(
                        x,
                        vec![true; n],
                        &removable,
                        Some(global_initial.clone()),
                        local_cfg,
                        Ranking::Impact,
                        Arc::new(Sequential),
                    )?;
                    let mut mirror = stat_values.clone();
                    let mut aggs = plan.chunk_aggs[i].clone();
                    while let Step::Removed(_) = engine.step()? {
                        let edit = &engine.last_commit().expect("a removal was just committed").window_edit;
                        if edit.is_empty() {
                            continue;
                        }
                        aggs.apply_multi_delta_bounded(&mirror, edit.first, &edit.deltas, chunk.clone());
                        mirror[edit.first..edit.first + edit.values.len()].copy_from_slice(&edit.values);
                        let last = edit.first + edit.values.len();
                        if i > 0 && edit.first < chunk.start + lags {
                            overlaps[i - 1].lock().unwrap().update(edit.first, &edit.values, lags, plan.shift);
                        }
                        if i + 1 < threads && last > chunk.end - lags {
                            overlaps[i].lock().unwrap().update(edit.first, &edit.values, lags, plan.shift);
                        }
                    }
                    Ok(WorkerResult { removed: engine.removed().to_vec(), aggs })
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    });
    let results: Vec<WorkerResult> = results.into_iter().collect::<Result<_>>()?;

    let chunk_aggs: Vec<AcfAggregates> = results.iter().map(|r| r.aggs.clone()).collect();
    let cross: Vec<Vec<f64>> = overlaps.into_iter().map(|m| m.into_inner().unwrap().cross).collect();
    let mut merged = merge(&chunk_aggs, &cross);

    let alive_for = |fraction: f64| -> (Vec<bool>, Vec<usize>) {
        let mut alive = vec![true; n];
        let mut counts = Vec::with_capacity(threads);
        for r in &results {
            let take = (r.removed.len() as f64 * fraction).floor() as usize;
            for &p in &r.removed[..take] {
                alive[p] = false;
            }
            counts.push(take);
        }
        (alive, counts)
    };
    let reference = reference_stat(x, &cfg)?;
    let (mut alive, mut local_removals) = alive_for(1.0);
    let fresh = fresh_aggs(x, &alive, &cfg, plan.shift)?;
    let merge_gap = merged.max_rel_diff(&fresh);
    let mut kept_fraction = 1.0;
    if !(deviation(&merged, &reference, &cfg) < cfg.epsilon) {
        // The local phases together overshot. Back off every worker's
        // removal list by the same fraction until the merged state is valid.
        let mut f = 0.5;
        loop {
            let (a, c) = alive_for(f);
            let aggs = fresh_aggs(x, &a, &cfg, plan.shift)?;
            (alive, local_removals, merged, kept_fraction) = (a, c, aggs, f);
            if f == 0.0 || deviation(&merged, &reference, &cfg) < cfg.epsilon {
                break;
            }
            f = if f < 1.0 / 64.0 { 0.0 } else { f / 2.0 };
        }
    }

    let removable: Vec<bool> = (0..n).map(|t| alive[t] && t > 0 && t + 1 < n).collect();
    let mut engine =
        Engine::from_state(x, alive, &removable, Some(merged), cfg, Ranking::Impact, Arc::new(Sequential))?;
    engine.run()?;
    let (compressed, mut report) = engine.finish()?;
    report.removals = n - compressed.kept_len();
    let note = format!("coarse: {threads} chunks, local budget {:.3e}", plan.local_budget);
    report.note = Some(match report.note.take() {
        Some(prev) => format!("{note}; {prev}"),
        None => note,
    });
    Ok(CoarseOutcome { compressed, report, local_removals, kept_fraction, merge_gap })
}

fn fresh_aggs(x: &[f64], alive: &[bool], cfg: &CompressorConfig, shift: f64) -> Result<AcfAggregates> {
    let kept: Vec<usize> = (0..x.len()).filter(|&i| alive[i]).collect();
    let recon = acfguard_core::series::reconstruct_from_kept(x, &kept);
    let w = window_aggregate(&recon, cfg.window, cfg.agg)?;
    AcfAggregates::extract_shifted(w.values(), cfg.lags, shift)
}

fn reference_stat(x: &[f64], cfg: &CompressorConfig) -> Result<Vec<f64>> {
    let shift = Engine::shift_for(x, cfg)?;
    let w = window_aggregate(x, cfg.window, cfg.agg)?;
    stat_of(&AcfAggregates::extract_shifted(w.values(), cfg.lags, shift)?, cfg)
}

fn stat_of(aggs: &AcfAggregates, cfg: &CompressorConfig) -> Result<Vec<f64>> {
    let mut s = aggs.get_acf()?.into_inner();
    if cfg.stat == StatKind::Pacf {
        let acf = s.clone();
        pacf_into(&acf, &mut s)?;
    }
    Ok(s)
}

fn deviation(aggs: &AcfAggregates, reference: &[f64], cfg: &CompressorConfig) -> f64 {
    match stat_of(aggs, cfg) {
        Ok(s) => measure(cfg.metric, reference, &s).unwrap_or(f64::INFINITY),
        Err(_) => f64::INFINITY,
    }
}
