//! Parameter exploration for the methods that do not take a statistic bound.

use alloc::vec::Vec;

use super::{assess, compress_dft, compress_pmc, compress_swing, DftCoefficients, Method, SegmentList};
use crate::cameo::CompressorConfig;
use crate::error::{Error, Result};
use crate::report::CompressionReport;
use crate::series::TimeSeries;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub param: f64,
    pub cr: f64,
    /// Statistic deviation under the configured metric, from scratch.
    pub acf_dev: f64,
    pub nrmse: Option<f64>,
}

/// Output of one parametric run.
#[derive(Debug, Clone, PartialEq)]
pub enum ParametricOutput {
    Segments(SegmentList),
    Coefficients(DftCoefficients),
}

impl ParametricOutput {
    pub fn reconstruct(&self) -> Vec<f64> {
        match self {
            ParametricOutput::Segments(s) => s.reconstruct(),
            ParametricOutput::Coefficients(c) => c.reconstruct(),
        }
    }

    pub fn bits_per_value(&self) -> f64 {
        match self {
            ParametricOutput::Segments(s) => s.bits_per_value(),
            ParametricOutput::Coefficients(c) => c.bits_per_value(),
        }
    }
}

/// Runs PMC or SWING with `param` as the per-point bound, or DFT with
/// `param` as the number of kept non-DC bins.
pub fn run_parametric(
    series: &TimeSeries,
    method: Method,
    param: f64,
    cfg: &CompressorConfig,
) -> Result<(ParametricOutput, CompressionReport)> {
    let x = series.values();
    let out = match method {
        Method::Pmc => ParametricOutput::Segments(compress_pmc(x, param)?),
        Method::Swing => ParametricOutput::Segments(compress_swing(x, param)?),
        Method::Dft => {
            if !(param >= 0.0) || libm::trunc(param) != param {
                return Err(Error::Config(alloc::format!("DFT needs a whole number of bins, got {param}")));
            }
            ParametricOutput::Coefficients(compress_dft(x, param as usize)?)
        }
        other => {
            return Err(Error::Config(alloc::format!("{} is not a parametric method", other.name())));
        }
    };
    let recon = out.reconstruct();
    let report = assess(method, x, &recon, out.bits_per_value(), cfg)?;
    Ok((out, report))
}

/// One row per parameter value, in the given order.
pub fn sweep(series: &TimeSeries, method: Method, params: &[f64], cfg: &CompressorConfig) -> Result<Vec<SweepRow>> {
    params
        .iter()
        .map(|&p| {
            let (_, r) = run_parametric(series, method, p, cfg)?;
            Ok(SweepRow { param: p, cr: r.cr, acf_dev: r.verification.scratch_acf_dev, nrmse: r.nrmse })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acf::acf_scratch;
    use crate::measure::{measure, QualityMeasure};
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn walk(n: usize, seed: u64) -> TimeSeries {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut v = 0.0;
        TimeSeries::new(
            (0..n)
                .map(|_| {
                    v += rng.random_range(-1.0..1.0);
                    v
                })
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn one_value_one_row() {
        let rows = sweep(&walk(200, 1), Method::Pmc, &[0.5], &CompressorConfig::new(0.01, 5)).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(sweep(&walk(200, 1), Method::Pmc, &[], &CompressorConfig::new(0.01, 5)).unwrap().is_empty());
    }

    #[test]
    fn deviation_column_is_scratch() {
        let ts = walk(300, 2);
        let cfg = CompressorConfig::new(0.01, 6);
        for method in [Method::Pmc, Method::Swing, Method::Dft] {
            let params = if method == Method::Dft { vec![3.0, 20.0] } else { vec![0.2, 1.0] };
            let rows = sweep(&ts, method, &params, &cfg).unwrap();
            for (row, &p) in rows.iter().zip(&params) {
                let (out, _) = run_parametric(&ts, method, p, &cfg).unwrap();
                let want = measure(
                    QualityMeasure::Mae,
                    acf_scratch(ts.values(), 6).unwrap().values(),
                    acf_scratch(&out.reconstruct(), 6).unwrap().values(),
                )
                .unwrap();
                assert_eq!(row.acf_dev, want);
            }
        }
    }

    #[test]
    fn pmc_ratio_grows_with_bound() {
        let ts = walk(2000, 3);
        let params = [0.05, 0.1, 0.2, 0.4, 0.8, 1.6];
        let rows = sweep(&ts, Method::Pmc, &params, &CompressorConfig::new(0.01, 10)).unwrap();
        for w in rows.windows(2) {
            assert!(w[1].cr >= w[0].cr);
        }
    }

    #[test]
    fn rejects_non_parametric() {
        assert!(run_parametric(&walk(50, 1), Method::Vw, 1.0, &CompressorConfig::new(0.1, 2)).is_err());
        assert!(run_parametric(&walk(50, 1), Method::Dft, 1.5, &CompressorConfig::new(0.1, 2)).is_err());
    }
}
