//! Distance measures between two equal-length sequences.
//!
//! Used both for reconstruction error (series vs series) and for the
//! statistic deviation that bounds compression (ACF vs ACF).

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{abs, compensated_sum, sqrt, KahanSum};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum QualityMeasure {
    #[default]
    Mae,
    /// `sqrt(mean((a - b)^2))`.
    Rmse,
    /// RMSE divided by the range of the first argument.
    Nrmse,
    MSmape,
    Mape,
    /// Chebyshev distance, `max |a - b|`.
    Cheb,
}

impl QualityMeasure {
    pub const ALL: [QualityMeasure; 6] = [
        QualityMeasure::Mae,
        QualityMeasure::Rmse,
        QualityMeasure::Nrmse,
        QualityMeasure::MSmape,
        QualityMeasure::Mape,
        QualityMeasure::Cheb,
    ];

    /// Byte tag used by the compressed file header.
    pub fn code(self) -> u8 {
        match self {
            QualityMeasure::Mae => 0,
            QualityMeasure::Rmse => 1,
            QualityMeasure::Nrmse => 2,
            QualityMeasure::MSmape => 3,
            QualityMeasure::Mape => 4,
            QualityMeasure::Cheb => 5,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn name(self) -> &'static str {
        match self {
            QualityMeasure::Mae => "mae",
            QualityMeasure::Rmse => "rmse",
            QualityMeasure::Nrmse => "nrmse",
            QualityMeasure::MSmape => "msmape",
            QualityMeasure::Mape => "mape",
            QualityMeasure::Cheb => "cheb",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.iter().copied().find(|m| m.name().eq_ignore_ascii_case(name))
    }
}

/// Distance between `a` and `b` under `kind`.
///
/// `a` is the reference: NRMSE normalizes by its range, MAPE divides by it,
/// and the mSMAPE smoothing term is computed from it.
pub fn measure(kind: QualityMeasure, a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    if a.is_empty() {
        return Err(Error::Empty);
    }
    let n = a.len() as f64;
    let diffs = a.iter().zip(b).map(|(x, y)| x - y);
    match kind {
        QualityMeasure::Mae => Ok(compensated_sum(diffs.map(abs)) / n),
        QualityMeasure::Rmse => Ok(rmse(a, b)),
        QualityMeasure::Nrmse => {
            let (lo, hi) = min_max(a);
            let range = hi - lo;
            if range <= 0.0 {
                return Err(Error::ZeroRange);
            }
            Ok(rmse(a, b) / range)
        }
        QualityMeasure::Cheb => Ok(diffs.map(abs).fold(0.0, f64::max)),
        QualityMeasure::Mape => {
            let mut acc = KahanSum::default();
            for (index, (x, y)) in a.iter().zip(b).enumerate() {
                if *x == 0.0 {
                    return Err(Error::ZeroDenominator { index });
                }
                acc.add(abs(x - y) / abs(*x));
            }
            Ok(acc.value() / n)
        }
        QualityMeasure::MSmape => msmape(a, b),
    }
}

fn rmse(a: &[f64], b: &[f64]) -> f64 {
    let ss = compensated_sum(a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)));
    sqrt(ss / a.len() as f64)
}

fn min_max(a: &[f64]) -> (f64, f64) {
    a.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)))
}

/// mSMAPE with the running mean-absolute-deviation smoother
/// `S_i = mean_{k<i} |a_k - mean(a_1..a_{i-1})|`, `S_1 = 0`.
///
/// Terms whose denominator is zero contribute nothing (only possible when
/// `S_i = 0` and `a_i = -b_i`). The smoother is evaluated in `O(n log n)` with
/// a Fenwick tree over the ranks of `a`.
fn msmape(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() < 2 {
        return Err(Error::Config("mSMAPE needs at least 2 samples".into()));
    }
    let mut sorted: Vec<f64> = a.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    sorted.dedup();
    let mut counts = Fenwick::new(sorted.len());
    let mut sums = Fenwick::new(sorted.len());
    let mut prefix = KahanSum::default();
    let mut acc = KahanSum::default();

    for (i, (&x, &y)) in a.iter().zip(b).enumerate() {
        let smoother = if i == 0 {
            0.0
        } else {
            let count = i as f64;
            let total = prefix.value();
            let mean = total / count;
            let below = sorted.partition_point(|&v| v <= mean);
            let (cnt_le, sum_le) = (counts.prefix(below), sums.prefix(below));
            let dev = mean * cnt_le - sum_le + (total - sum_le) - mean * (count - cnt_le);
            dev.max(0.0) / count
        };
        let denom = abs(x + y) / 2.0 + smoother;
        if denom > 0.0 {
            acc.add(abs(x - y) / denom);
        }
        let rank = sorted.partition_point(|&v| v < x);
        counts.add(rank, 1.0);
        sums.add(rank, x);
        prefix.add(x);
    }
    Ok(acc.value() / a.len() as f64)
}

struct Fenwick {
    tree: Vec<f64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self { tree: alloc::vec![0.0; n + 1] }
    }

    fn add(&mut self, idx: usize, v: f64) {
        let mut i = idx + 1;
        while i < self.tree.len() {
            self.tree[i] += v;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over ranks `[0, end)`.
    fn prefix(&self, end: usize) -> f64 {
        let mut i = end;
        let mut s = 0.0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Direct O(n^2) evaluation of mSMAPE.
    fn msmape_naive(a: &[f64], b: &[f64]) -> f64 {
        let n = a.len();
        let mut total = 0.0;
        for i in 0..n {
            let s = if i == 0 {
                0.0
            } else {
                let mean = a[..i].iter().sum::<f64>() / i as f64;
                a[..i].iter().map(|v| (v - mean).abs()).sum::<f64>() / i as f64
            };
            let d = (a[i] + b[i]).abs() / 2.0 + s;
            if d > 0.0 {
                total += (a[i] - b[i]).abs() / d;
            }
        }
        total / n as f64
    }

    #[test]
    fn trivial_examples() {
        assert_eq!(measure(QualityMeasure::Mae, &[1., 2., 3.], &[1., 2., 3.]).unwrap(), 0.0);
        assert_eq!(measure(QualityMeasure::Cheb, &[0., 0., 0.], &[1., -2., 0.5]).unwrap(), 2.0);
        let r = measure(QualityMeasure::Rmse, &[0., 0.], &[3., 4.]).unwrap();
        assert!((r - (12.5f64).sqrt()).abs() < 1e-15);
        let nr = measure(QualityMeasure::Nrmse, &[0., 2.], &[0., 0.]).unwrap();
        assert!((nr - 2f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(measure(QualityMeasure::Mape, &[2., 4.], &[1., 5.]).unwrap(), 0.375);
    }

    #[test]
    fn msmape_five_elements_matches_direct_formula() {
        let a = [3.0, -1.5, 4.25, 0.5, 2.0];
        let b = [2.5, -1.0, 5.0, 0.0, 2.5];
        let got = measure(QualityMeasure::MSmape, &a, &b).unwrap();
        assert!((got - msmape_naive(&a, &b)).abs() < 1e-12, "{got}");
    }

    #[test]
    fn errors() {
        assert_eq!(measure(QualityMeasure::Mae, &[1.0], &[1.0, 2.0]), Err(Error::LengthMismatch { left: 1, right: 2 }));
        assert_eq!(measure(QualityMeasure::Nrmse, &[1.0, 1.0], &[0.0, 2.0]), Err(Error::ZeroRange));
        assert_eq!(measure(QualityMeasure::Mape, &[1.0, 0.0], &[1.0, 0.0]), Err(Error::ZeroDenominator { index: 1 }));
        assert!(measure(QualityMeasure::MSmape, &[1.0], &[1.0]).is_err());
        assert_eq!(measure(QualityMeasure::Mae, &[], &[]), Err(Error::Empty));
    }

    #[test]
    fn codes_round_trip() {
        for m in QualityMeasure::ALL {
            assert_eq!(QualityMeasure::from_code(m.code()), Some(m));
            assert_eq!(QualityMeasure::from_name(m.name()), Some(m));
        }
        assert_eq!(QualityMeasure::from_code(6), None);
    }

    fn vecs(n: usize) -> impl Strategy<Value = (Vec<f64>, Vec<f64>, Vec<f64>)> {
        (
            proptest::collection::vec(-100.0f64..100.0, n),
            proptest::collection::vec(-100.0f64..100.0, n),
            proptest::collection::vec(-100.0f64..100.0, n),
        )
    }

    proptest! {
        #[test]
        fn symmetric_and_triangle((a, b, c) in (1usize..40).prop_flat_map(vecs), k in -5.0f64..5.0) {
            for kind in [QualityMeasure::Mae, QualityMeasure::Rmse, QualityMeasure::Cheb] {
                let ab = measure(kind, &a, &b).unwrap();
                let ba = measure(kind, &b, &a).unwrap();
                prop_assert!((ab - ba).abs() <= 1e-12 * (1.0 + ab));
                prop_assert!(ab >= 0.0);
            }
            for kind in [QualityMeasure::Mae, QualityMeasure::Cheb] {
                let ab = measure(kind, &a, &b).unwrap();
                let ac = measure(kind, &a, &c).unwrap();
                let cb = measure(kind, &c, &b).unwrap();
                prop_assert!(ab <= ac + cb + 1e-9);
            }
            let ka: Vec<f64> = a.iter().map(|v| v * k).collect();
            let kb: Vec<f64> = b.iter().map(|v| v * k).collect();
            let lhs = measure(QualityMeasure::Mae, &ka, &kb).unwrap();
            let rhs = k.abs() * measure(QualityMeasure::Mae, &a, &b).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-9 * (1.0 + rhs));
        }

        #[test]
        fn msmape_matches_naive((a, b, _c) in (2usize..60).prop_flat_map(vecs)) {
            let got = measure(QualityMeasure::MSmape, &a, &b).unwrap();
            let want = msmape_naive(&a, &b);
            prop_assert!((got - want).abs() <= 1e-9 * (1.0 + want), "{} vs {}", got, want);
        }

        #[test]
        fn identical_is_zero(a in proptest::collection::vec(-10.0f64..10.0, 2..30)) {
            for kind in [QualityMeasure::Mae, QualityMeasure::Rmse, QualityMeasure::Cheb] {
                prop_assert_eq!(measure(kind, &a, &a).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn msmape_first_term_zero_denominator_skipped() {
        // i = 1: S_1 = 0 and a_1 + b_1 = 0
        let v = measure(QualityMeasure::MSmape, &[1.0, 2.0], &[-1.0, 2.0]).unwrap();
        assert_eq!(v, 0.0);
    }
}
