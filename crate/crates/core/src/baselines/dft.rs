//! Fourier truncation: keep the DC term and the `k` strongest non-negative
//! frequencies; the reconstruction adds back their conjugate partners so it
//! stays real.

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{Error, Result};
use crate::math::{cos, hypot, sin, KahanSum};

/// Storage per kept bin: two 64-bit parts plus a 32-bit frequency index.
const BITS_PER_BIN: f64 = 128.0 + 32.0;

#[derive(Debug, Clone, PartialEq)]
pub struct DftCoefficients {
    pub n: usize,
    /// `(frequency, re, im)`, ascending by frequency, DC first.
    pub bins: Vec<(usize, f64, f64)>,
}

struct Twiddles {
    cos: Vec<f64>,
    sin: Vec<f64>,
}

impl Twiddles {
    fn new(n: usize) -> Self {
        let step = 2.0 * PI / n as f64;
        Self {
            cos: (0..n).map(|j| cos(step * j as f64)).collect(),
            sin: (0..n).map(|j| sin(step * j as f64)).collect(),
        }
    }
}

/// `X_f = Σ_t x_t·e^{−2πi f t / n}` for `f = 0..=⌊n/2⌋`, direct `O(n²)`.
pub fn dft(x: &[f64]) -> Vec<(f64, f64)> {
    let n = x.len();
    let tw = Twiddles::new(n);
    (0..=n / 2)
        .map(|f| {
            let (mut re, mut im) = (KahanSum::default(), KahanSum::default());
            for (t, &v) in x.iter().enumerate() {
                let j = (f * t) % n;
                re.add(v * tw.cos[j]);
                im.add(-v * tw.sin[j]);
            }
            (re.value(), im.value())
        })
        .collect()
}

pub fn compress_dft(x: &[f64], keep_k: usize) -> Result<DftCoefficients> {
    let n = x.len();
    if n == 0 {
        return Err(Error::Empty);
    }
    if keep_k > n / 2 {
        return Err(Error::Config(alloc::format!("keep_k {keep_k} exceeds n/2 = {}", n / 2)));
    }
    let spec = dft(x);
    let mut order: Vec<usize> = (1..spec.len()).collect();
    order.sort_by(|&a, &b| {
        let (ma, mb) = (hypot(spec[a].0, spec[a].1), hypot(spec[b].0, spec[b].1));
        mb.total_cmp(&ma).then(a.cmp(&b))
    });
    let mut keep: Vec<usize> = order.into_iter().take(keep_k).collect();
    keep.push(0);
    keep.sort_unstable();
    Ok(DftCoefficients { n, bins: keep.into_iter().map(|f| (f, spec[f].0, spec[f].1)).collect() })
}

impl DftCoefficients {
    pub fn reconstruct(&self) -> Vec<f64> {
        let n = self.n;
        let tw = Twiddles::new(n);
        (0..n)
            .map(|t| {
                let mut acc = KahanSum::default();
                for &(f, re, im) in &self.bins {
                    // bins other than DC and Nyquist stand for themselves and
                    // their conjugate mirror
                    let w = if f == 0 || 2 * f == n { 1.0 } else { 2.0 };
                    let j = (f * t) % n;
                    acc.add(w * (re * tw.cos[j] - im * tw.sin[j]));
                }
                acc.value() / n as f64
            })
            .collect()
    }

    pub fn bits_per_value(&self) -> f64 {
        BITS_PER_BIN * self.bins.len() as f64 / self.n as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random(n: usize, seed: u64) -> Vec<f64> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| rng.random_range(-3.0..3.0)).collect()
    }

    #[test]
    fn single_tone_needs_one_bin() {
        let n = 128;
        let x: Vec<f64> = (0..n).map(|t| 2.0 * (2.0 * PI * 5.0 * t as f64 / n as f64).sin()).collect();
        let c = compress_dft(&x, 1).unwrap();
        assert_eq!(c.bins.iter().map(|b| b.0).collect::<Vec<_>>(), vec![0, 5]);
        for (a, b) in x.iter().zip(c.reconstruct()) {
            assert!((a - b).abs() <= 1e-9);
        }
    }

    #[test]
    fn all_bins_round_trip() {
        for n in [64usize, 65, 100, 7] {
            let x = random(n, n as u64);
            let r = compress_dft(&x, n / 2).unwrap().reconstruct();
            for (a, b) in x.iter().zip(&r) {
                assert!((a - b).abs() <= 1e-9, "n={n}");
            }
        }
    }

    #[test]
    fn parseval() {
        for n in [64usize, 99] {
            let x = random(n, 3);
            let spec = dft(&x);
            let energy: f64 = x.iter().map(|v| v * v).sum();
            // full spectrum from the half spectrum by conjugate symmetry
            let spectral: f64 = spec
                .iter()
                .enumerate()
                .map(|(f, (re, im))| {
                    let w = if f == 0 || 2 * f == n { 1.0 } else { 2.0 };
                    w * (re * re + im * im)
                })
                .sum::<f64>()
                / n as f64;
            assert!((energy - spectral).abs() <= 1e-6 * energy);
        }
    }

    #[test]
    fn too_many_bins() {
        assert!(compress_dft(&[1.0; 10], 6).is_err());
    }

    #[test]
    fn bits() {
        let c = compress_dft(&random(160, 1), 4).unwrap();
        assert_eq!(c.bits_per_value(), 5.0);
    }
}
