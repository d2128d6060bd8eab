//! Command-line frontend.
//!
//! Exit codes: 0 on success, 1 on usage, I/O or verification errors, 2 when
//! the requested constraint cannot be met (TP phase one already over the
//! bound, a parametric run over `ε`, or an unreachable target ratio).

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use acfguard_core::baselines::{
    compress_pip, compress_tp, compress_vw, run_parametric, sweep, Method, ParametricOutput, PipDistance, TpScore,
};
use acfguard_core::cameo::StopMode;
use acfguard_core::{
    decompress, AggKind, CompressedSeries, CompressionReport, CompressorConfig, Error as CoreError, Hops,
    QualityMeasure, StatKind, TimeSeries,
};
use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::io::{self, Column};
use crate::json::{to_json, ConfigEcho, ReportDoc, SweepDoc, SweepPoint};
use crate::parallel::{compress_coarse, compress_fine};
use crate::plot::frontier_svg;
use crate::synth::{generate, Family, SyntheticSpec};

#[derive(Parser, Debug)]
#[command(name = "acfguard", version, about = "Lossy time series compression that bounds the change in ACF/PACF")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compress a CSV column.
    Compress(CompressArgs),
    /// Expand a compressed file back to one value per line.
    Decompress(DecompressArgs),
    /// Compare an original series with a reconstruction.
    Evaluate(EvaluateArgs),
    /// Run a method over a list of parameter values and report the frontier.
    Sweep(SweepArgs),
    /// Time single-threaded and parallel compression on one input.
    Bench(BenchArgs),
    /// Write a seeded synthetic series.
    Generate(GenerateArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodArg {
    Cameo,
    Vw,
    Tps,
    Tpm,
    Pipv,
    Pipe,
    Pmc,
    Swing,
    Dft,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Cameo => Method::Cameo,
            MethodArg::Vw => Method::Vw,
            MethodArg::Tps => Method::TpSum,
            MethodArg::Tpm => Method::TpMean,
            MethodArg::Pipv => Method::PipVertical,
            MethodArg::Pipe => Method::PipEuclidean,
            MethodArg::Pmc => Method::Pmc,
            MethodArg::Swing => Method::Swing,
            MethodArg::Dft => Method::Dft,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum StatArg {
    Acf,
    Pacf,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MetricArg {
    Mae,
    Rmse,
    Nrmse,
    Cheb,
    Mape,
    Msmape,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum AggArg {
    None,
    Mean,
    Sum,
    Min,
    Max,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeArg {
    ErrorBound,
    TargetCr,
}

/// `N`, `logn`, `KxLOGN` or `full`.
pub fn parse_hops(s: &str) -> Result<Hops, String> {
    let l = s.to_ascii_lowercase();
    if l == "full" {
        return Ok(Hops::Full);
    }
    if l == "logn" {
        return Ok(Hops::LogN);
    }
    if let Some(k) = l.strip_suffix("xlogn") {
        return k.parse().map(Hops::KLogN).map_err(|_| format!("bad hop multiplier in {s:?}"));
    }
    l.parse().map(Hops::Fixed).map_err(|_| format!("hops must be N, logn, KxLOGN or full, got {s:?}"))
}

/// Comma-separated numbers; an empty string is an empty list.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ParamList(pub Vec<f64>);

fn parse_list(s: &str) -> Result<ParamList, String> {
    if s.trim().is_empty() {
        return Ok(ParamList(Vec::new()));
    }
    s.split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|_| format!("not a number: {v:?}")))
        .collect::<Result<_, _>>()
        .map(ParamList)
}

/// Statistic and stopping configuration shared by several subcommands.
#[derive(Args, Debug, Clone)]
pub struct StatOpts {
    #[arg(long, value_enum, default_value = "acf")]
    pub stat: StatArg,
    #[arg(long, value_enum, default_value = "mae")]
    pub metric: MetricArg,
    #[arg(long, default_value_t = 10)]
    pub lags: usize,
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 1)]
    pub window: usize,
    #[arg(long, value_enum)]
    pub agg: Option<AggArg>,
}

impl StatOpts {
    pub fn config(&self) -> CompressorConfig {
        let mut cfg = CompressorConfig::new(self.epsilon, self.lags);
        cfg.stat = match self.stat {
            StatArg::Acf => StatKind::Acf,
            StatArg::Pacf => StatKind::Pacf,
        };
        cfg.metric = match self.metric {
            MetricArg::Mae => QualityMeasure::Mae,
            MetricArg::Rmse => QualityMeasure::Rmse,
            MetricArg::Nrmse => QualityMeasure::Nrmse,
            MetricArg::Cheb => QualityMeasure::Cheb,
            MetricArg::Mape => QualityMeasure::Mape,
            MetricArg::Msmape => QualityMeasure::MSmape,
        };
        cfg.window = self.window;
        // a window without an explicit aggregate means the window mean
        cfg.agg = match self.agg {
            Some(AggArg::None) => AggKind::None,
            Some(AggArg::Mean) => AggKind::Mean,
            Some(AggArg::Sum) => AggKind::Sum,
            Some(AggArg::Min) => AggKind::Min,
            Some(AggArg::Max) => AggKind::Max,
            None if self.window > 1 => AggKind::Mean,
            None => AggKind::None,
        };
        cfg
    }
}

#[derive(Args, Debug, Clone)]
pub struct RunOpts {
    #[command(flatten)]
    pub stat: StatOpts,
    #[arg(long, value_enum, default_value = "error-bound")]
    pub mode: ModeArg,
    #[arg(long)]
    pub target_cr: Option<f64>,
    #[arg(long, value_parser = parse_hops, default_value = "10xlogn")]
    pub hops: Hops,
    #[arg(long, env = "ACFGUARD_THREADS", default_value_t = 1)]
    pub threads_fine: usize,
    #[arg(long, default_value_t = 1)]
    pub threads_coarse: usize,
    #[arg(long, default_value_t = 0.9)]
    pub budget_fraction: f64,
    /// Compare running sums with a fresh recomputation at checkpoints.
    #[arg(long)]
    pub drift_check: bool,
    /// Stop at the first popped candidate over the bound even when its
    /// queued impact predates the last removal.
    #[arg(long)]
    pub strict_pop: bool,
}

impl RunOpts {
    pub fn config(&self) -> anyhow::Result<CompressorConfig> {
        let mut cfg = self.stat.config();
        cfg.hops = self.hops;
        cfg.drift_check = self.drift_check;
        cfg.refresh_stale = !self.strict_pop;
        cfg.mode = match (self.mode, self.target_cr) {
            (ModeArg::ErrorBound, None) => StopMode::ErrorBound,
            (ModeArg::TargetCr, Some(c)) => StopMode::TargetRatio(c),
            (ModeArg::TargetCr, None) => bail!("--mode target-cr needs --target-cr"),
            (ModeArg::ErrorBound, Some(_)) => bail!("--target-cr needs --mode target-cr"),
        };
        if self.threads_fine == 0 || self.threads_coarse == 0 {
            bail!("thread counts must be positive");
        }
        if self.threads_fine > 1 && self.threads_coarse > 1 {
            bail!("--threads-fine and --threads-coarse cannot both exceed 1");
        }
        if self.threads_coarse > 1 && cfg.mode != StopMode::ErrorBound {
            bail!("--threads-coarse supports error-bound mode only");
        }
        if !(self.budget_fraction > 0.0 && self.budget_fraction <= 1.0) {
            bail!("--budget-fraction must be in (0, 1]");
        }
        Ok(cfg)
    }

    fn echo(&self, cfg: &CompressorConfig) -> ConfigEcho {
        ConfigEcho::new(cfg, self.threads_fine, self.threads_coarse, self.budget_fraction)
    }
}

#[derive(Args, Debug)]
pub struct CompressArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// CSV column, by 0-based index or header name.
    #[arg(long, default_value = "0")]
    pub column: Column,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "cameo")]
    pub method: MethodArg,
    /// Native parameter of pmc, swing (per-point bound) and dft (kept bins).
    #[arg(long)]
    pub param: Option<f64>,
    #[command(flatten)]
    pub run: RunOpts,
    /// JSON report path; printed to stdout when absent.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Also write the reconstruction as CSV.
    #[arg(long)]
    pub reconstruction: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct DecompressArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Defaults to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct EvaluateArgs {
    /// Original series (CSV).
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "0")]
    pub column: Column,
    /// Reconstruction: a compressed file or a one-column CSV.
    #[arg(long)]
    pub reconstruction: PathBuf,
    #[command(flatten)]
    pub stat: StatOpts,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct SweepArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "0")]
    pub column: Column,
    #[arg(long, value_enum)]
    pub method: MethodArg,
    /// Native parameters for pmc/swing/dft, error bounds for the others.
    #[arg(long, value_parser = parse_list)]
    pub sweep: ParamList,
    #[command(flatten)]
    pub run: RunOpts,
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value = "0")]
    pub column: Column,
    #[command(flatten)]
    pub run: RunOpts,
    /// Repetitions per configuration; the fastest is reported.
    #[arg(long, default_value_t = 1)]
    pub repeat: usize,
    #[arg(long)]
    pub report: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FamilyArg {
    Ar1,
    Sinusoid,
    RandomWalk,
    SquareWave,
    Line,
}

#[derive(Args, Debug)]
pub struct GenerateArgs {
    #[arg(long, value_enum)]
    pub family: FamilyArg,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.8)]
    pub phi: f64,
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 24.0)]
    pub period: f64,
    #[arg(long, default_value_t = 1.0)]
    pub amplitude: f64,
    #[arg(long, default_value_t = 0.0)]
    pub noise: f64,
    #[arg(long, default_value_t = 1.0)]
    pub slope: f64,
    /// Defaults to stdout.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

/// The constraint could not be met; maps to exit code 2.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct Unsatisfiable(pub String);

/// What a compression run produced.
#[derive(Debug, Clone)]
pub enum Output {
    Points(CompressedSeries),
    Parametric(ParametricOutput),
}

impl Output {
    pub fn reconstruct(&self) -> anyhow::Result<Vec<f64>> {
        Ok(match self {
            Output::Points(cs) => decompress(cs)?.into_values(),
            Output::Parametric(p) => p.reconstruct(),
        })
    }
}

/// Runs one method. Point methods honour the thread options; parametric
/// methods need `param`.
pub fn run_method(
    series: &TimeSeries,
    method: Method,
    cfg: &CompressorConfig,
    param: Option<f64>,
    threads_fine: usize,
    threads_coarse: usize,
    budget_fraction: f64,
) -> acfguard_core::Result<(Output, CompressionReport)> {
    let start = Instant::now();
    let (out, mut report) = match method {
        Method::Cameo if threads_coarse > 1 => {
            let (cs, r) = compress_coarse(series, *cfg, threads_coarse, budget_fraction)?;
            (Output::Points(cs), r)
        }
        Method::Cameo => {
            let (cs, r) = compress_fine(series, *cfg, threads_fine)?;
            (Output::Points(cs), r)
        }
        Method::Vw => points(compress_vw(series, cfg)?),
        Method::TpSum => points(compress_tp(series, cfg, TpScore::Sum)?),
        Method::TpMean => points(compress_tp(series, cfg, TpScore::Mean)?),
        Method::PipVertical => points(compress_pip(series, cfg, PipDistance::Vertical)?),
        Method::PipEuclidean => points(compress_pip(series, cfg, PipDistance::Euclidean)?),
        Method::Pmc | Method::Swing | Method::Dft => {
            let p = param.ok_or_else(|| CoreError::Config(format!("{} needs --param", method.name())))?;
            let (o, r) = run_parametric(series, method, p, cfg)?;
            (Output::Parametric(o), r)
        }
    };
    report.runtime_ms = start.elapsed().as_secs_f64() * 1e3;
    Ok((out, report))
}

fn points((cs, r): (CompressedSeries, CompressionReport)) -> (Output, CompressionReport) {
    (Output::Points(cs), r)
}

fn write_or_print(path: Option<&Path>, text: &str) -> anyhow::Result<()> {
    match path {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            std::io::stdout().write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn load(path: &Path, column: &Column) -> anyhow::Result<TimeSeries> {
    io::load_csv(path, column).with_context(|| format!("reading {}", path.display()))
}

fn check_thread_use(method: Method, run: &RunOpts) -> anyhow::Result<()> {
    // fine-grained threading never changes output, so it is simply unused
    // by the other methods
    if method != Method::Cameo && run.threads_coarse > 1 {
        bail!("--threads-coarse applies to --method cameo only");
    }
    Ok(())
}

fn cmd_compress(a: &CompressArgs) -> anyhow::Result<()> {
    let method = Method::from(a.method);
    let cfg = a.run.config()?;
    check_thread_use(method, &a.run)?;
    match (method.is_parametric(), a.param) {
        (true, None) => bail!("--method {} needs --param", method.name()),
        (false, Some(_)) => bail!("--param applies to pmc, swing and dft only"),
        _ => {}
    }
    if method != Method::Cameo && cfg.mode != StopMode::ErrorBound {
        bail!("target-cr mode applies to --method cameo only");
    }
    let series = load(&a.input, &a.column)?;
    let (out, report) = match run_method(
        &series,
        method,
        &cfg,
        a.param,
        a.run.threads_fine,
        a.run.threads_coarse,
        a.run.budget_fraction,
    ) {
        Err(e @ CoreError::TargetUnreachable { .. }) => return Err(Unsatisfiable(e.to_string()).into()),
        other => other?,
    };
    write_or_print(a.report.as_deref(), &to_json(&ReportDoc::new(&report, a.run.echo(&cfg))))?;
    if !report.verification.passed {
        let msg = format!(
            "{}: statistic deviation {} is not below {}",
            method.name(),
            report.verification.scratch_acf_dev,
            cfg.epsilon
        );
        if matches!(method, Method::TpSum | Method::TpMean | Method::Pmc | Method::Swing | Method::Dft) {
            return Err(Unsatisfiable(match &report.note {
                Some(n) => format!("{msg} ({n})"),
                None => msg,
            })
            .into());
        }
        bail!("verification failed: {msg}");
    }
    match &out {
        Output::Points(cs) => io::write_compressed(&a.output, cs)?,
        Output::Parametric(p) => io::write_parametric(&mut std::fs::File::create(&a.output)?, p)?,
    }
    if let Some(path) = &a.reconstruction {
        io::write_values(&mut std::fs::File::create(path)?, &out.reconstruct()?)?;
    }
    Ok(())
}

fn cmd_decompress(a: &DecompressArgs) -> anyhow::Result<()> {
    let cs = io::read_compressed(&a.input).with_context(|| format!("reading {}", a.input.display()))?;
    let ts = decompress(&cs)?;
    let mut buf = Vec::new();
    io::write_values(&mut buf, ts.values())?;
    write_or_print(a.output.as_deref(), std::str::from_utf8(&buf)?)
}

fn load_reconstruction(path: &Path) -> anyhow::Result<Vec<f64>> {
    let bytes = std::fs::read(path).with_context(|| format!("reading {}", path.display()))?;
    if bytes.starts_with(io::MAGIC) {
        return Ok(decompress(&io::decode(&bytes)?)?.into_values());
    }
    let text =
        String::from_utf8(bytes).map_err(|_| anyhow!("{} is neither a compressed file nor text", path.display()))?;
    Ok(io::parse_csv(&text, &Column::Index(0))?.into_values())
}

fn cmd_evaluate(a: &EvaluateArgs) -> anyhow::Result<()> {
    let cfg = a.stat.config();
    let original = load(&a.input, &a.column)?;
    let recon = load_reconstruction(&a.reconstruction)?;
    if recon.len() != original.len() {
        bail!("reconstruction has {} values, original has {}", recon.len(), original.len());
    }
    let report = CompressionReport::assess(
        "evaluate",
        original.values(),
        &recon,
        &cfg.stat_config(),
        cfg.metric,
        cfg.epsilon,
        64.0,
    )?;
    let doc = ReportDoc::new(&report, ConfigEcho::new(&cfg, 1, 1, 0.9));
    write_or_print(a.report.as_deref(), &to_json(&doc))
}

/// Frontier for a method: native parameters for the parametric ones, error
/// bounds for the rest.
pub fn sweep_method(
    series: &TimeSeries,
    method: Method,
    values: &[f64],
    cfg: &CompressorConfig,
    run: &RunOpts,
) -> anyhow::Result<Vec<SweepPoint>> {
    if method.is_parametric() {
        return Ok(sweep(series, method, values, cfg)?.iter().map(SweepPoint::from).collect());
    }
    values
        .iter()
        .map(|&eps| {
            let mut c = *cfg;
            c.epsilon = eps;
            let (_, r) =
                run_method(series, method, &c, None, run.threads_fine, run.threads_coarse, run.budget_fraction)?;
            Ok(SweepPoint {
                param: eps,
                cr: r.cr,
                acf_dev: if r.verification.scratch_acf_dev.is_finite() {
                    r.verification.scratch_acf_dev
                } else {
                    f64::MAX
                },
                nrmse: r.nrmse,
            })
        })
        .collect()
}

fn cmd_sweep(a: &SweepArgs) -> anyhow::Result<()> {
    let method = Method::from(a.method);
    let cfg = a.run.config()?;
    check_thread_use(method, &a.run)?;
    if cfg.mode != StopMode::ErrorBound {
        bail!("sweep runs in error-bound mode");
    }
    let series = load(&a.input, &a.column)?;
    let frontier = sweep_method(&series, method, &a.sweep.0, &cfg, &a.run)?;
    if let Some(p) = &a.plot {
        let title = format!("{} frontier", method.name());
        std::fs::write(p, frontier_svg(&title, &[(method.name(), &frontier)]))?;
    }
    let doc = SweepDoc { method: method.name().into(), config: a.run.echo(&cfg), frontier };
    write_or_print(a.report.as_deref(), &to_json(&doc))
}

#[derive(Debug, serde::Serialize)]
struct BenchRow {
    strategy: &'static str,
    threads: usize,
    runtime_ms: f64,
    cr: f64,
    scratch_acf_dev: f64,
    passed: bool,
}

fn cmd_bench(a: &BenchArgs) -> anyhow::Result<()> {
    let cfg = a.run.config()?;
    let series = load(&a.input, &a.column)?;
    let mut plans = vec![("sequential", 1, 1)];
    if a.run.threads_fine > 1 {
        plans.push(("fine", a.run.threads_fine, 1));
    }
    if a.run.threads_coarse > 1 {
        plans.push(("coarse", 1, a.run.threads_coarse));
    }
    let mut rows = Vec::new();
    for (strategy, tf, tc) in plans {
        let mut best: Option<CompressionReport> = None;
        for _ in 0..a.repeat.max(1) {
            let (_, r) = run_method(&series, Method::Cameo, &cfg, None, tf, tc, a.run.budget_fraction)?;
            if best.as_ref().is_none_or(|b| r.runtime_ms < b.runtime_ms) {
                best = Some(r);
            }
        }
        let r = best.expect("at least one repetition");
        eprintln!("{strategy:>10} threads={:<3} {:>10.1} ms  CR {:.3}", tf.max(tc), r.runtime_ms, r.cr);
        rows.push(BenchRow {
            strategy,
            threads: tf.max(tc),
            runtime_ms: r.runtime_ms,
            cr: r.cr,
            scratch_acf_dev: r.verification.scratch_acf_dev,
            passed: r.verification.passed,
        });
    }
    write_or_print(a.report.as_deref(), &to_json(&rows))
}

fn cmd_generate(a: &GenerateArgs) -> anyhow::Result<()> {
    let family = match a.family {
        FamilyArg::Ar1 => Family::Ar1 { phi: a.phi, sigma: a.sigma },
        FamilyArg::Sinusoid => Family::Sinusoid { period: a.period, amplitude: a.amplitude, noise: a.noise },
        FamilyArg::RandomWalk => Family::RandomWalk { sigma: a.sigma },
        FamilyArg::SquareWave => Family::SquareWave { period: a.period },
        FamilyArg::Line => Family::Line { slope: a.slope },
    };
    let ts = generate(&SyntheticSpec { family, n: a.n, seed: a.seed })?;
    let mut buf = Vec::new();
    io::write_values(&mut buf, ts.values())?;
    write_or_print(a.output.as_deref(), std::str::from_utf8(&buf)?)
}

pub fn execute(cli: &Cli) -> anyhow::Result<()> {
    match &cli.command {
        Command::Compress(a) => cmd_compress(a),
        Command::Decompress(a) => cmd_decompress(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Generate(a) => cmd_generate(a),
    }
}

/// Parses `argv`, runs, reports errors on stderr and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Unsatisfiable>().is_some() {
                2
            } else {
                1
            }
        }
    }
}
