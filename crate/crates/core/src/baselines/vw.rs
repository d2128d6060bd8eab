//! Visvalingam-Whyatt: drop the point with the smallest effective triangle
//! area while the statistic stays within the bound.

use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;

use crate::cameo::{CompressorConfig, Engine, Ranking, Sequential};
use crate::error::Result;
use crate::math::abs;
use crate::report::CompressionReport;
use crate::series::{CompressedSeries, TimeSeries};

/// Area of the triangle `(t0, y0), (t1, y1), (t2, y2)`.
pub fn triangle_area(p0: (f64, f64), p1: (f64, f64), p2: (f64, f64)) -> f64 {
    0.5 * abs((p1.0 - p0.0) * (p2.1 - p0.1) - (p2.0 - p0.0) * (p1.1 - p0.1))
}

pub fn compress_vw(series: &TimeSeries, cfg: &CompressorConfig) -> Result<(CompressedSeries, CompressionReport)> {
    let n = series.len();
    let removable: Vec<bool> = (0..n).map(|i| i > 0 && i + 1 < n).collect();
    let mut engine = Engine::from_state(
        series.values(),
        vec![true; n],
        &removable,
        None,
        *cfg,
        Ranking::Area,
        Arc::new(Sequential),
    )?;
    engine.run()?;
    engine.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::acf::acf_scratch;
    use crate::cameo::compress;
    use crate::measure::{measure, QualityMeasure};
    use crate::series::decompress;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    #[test]
    fn shoelace() {
        assert_eq!(triangle_area((0.0, 0.0), (1.0, 1.0), (2.0, 0.0)), 1.0);
    }

    #[test]
    fn line_collapses() {
        let x = TimeSeries::new((0..30).map(|t| 2.0 * t as f64 - 1.0).collect()).unwrap();
        let (cs, _) = compress_vw(&x, &CompressorConfig::new(1e-6, 2)).unwrap();
        assert_eq!(cs.kept_len(), 2);
    }

    #[test]
    fn bound_holds_and_cameo_is_at_least_as_good() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let x: Vec<f64> = (0..512)
            .map(|t| {
                let e: f64 = rng.sample(StandardNormal);
                (2.0 * core::f64::consts::PI * t as f64 / 32.0).sin() + 0.05 * e
            })
            .collect();
        let ts = TimeSeries::new(x.clone()).unwrap();
        let cfg = CompressorConfig::new(0.01, 16);
        let (vw, rep) = compress_vw(&ts, &cfg).unwrap();
        assert!(rep.verification.passed);
        assert_eq!(rep.method, "vw");
        let recon = decompress(&vw).unwrap();
        let d = measure(
            QualityMeasure::Mae,
            acf_scratch(&x, 16).unwrap().values(),
            acf_scratch(recon.values(), 16).unwrap().values(),
        )
        .unwrap();
        assert!(d < 0.01);
        let (cameo, _) = compress(&ts, cfg).unwrap();
        assert!(cameo.compression_ratio() >= vw.compression_ratio());
    }
}
