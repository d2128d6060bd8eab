//! Seeded synthetic series.
//!
//! Randomness comes from ChaCha8 seeded with `seed_from_u64`; Gaussian noise
//! uses the ziggurat `StandardNormal` sampler. Both are platform independent,
//! so a seed names the same series everywhere.

use std::f64::consts::PI;

use acfguard_core::{Error, Result, TimeSeries};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Family {
    /// `x_t = φ·x_{t−1} + σ·e_t`, started from the stationary distribution.
    Ar1 {
        phi: f64,
        sigma: f64,
    },
    Sinusoid {
        period: f64,
        amplitude: f64,
        noise: f64,
    },
    RandomWalk {
        sigma: f64,
    },
    /// ±1 with half-period high then half-period low.
    SquareWave {
        period: f64,
    },
    /// `slope·t`.
    Line {
        slope: f64,
    },
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::Ar1 { .. } => "ar1",
            Family::Sinusoid { .. } => "sinusoid",
            Family::RandomWalk { .. } => "random-walk",
            Family::SquareWave { .. } => "square-wave",
            Family::Line { .. } => "line",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub family: Family,
    pub n: usize,
    pub seed: u64,
}

fn check_param(ok: bool, what: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config(what.into()))
    }
}

pub fn generate(spec: &SyntheticSpec) -> Result<TimeSeries> {
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut normal = move || -> f64 { StandardNormal.sample(&mut rng) };
    let values: Vec<f64> = match spec.family {
        Family::Ar1 { phi, sigma } => {
            check_param(phi.abs() < 1.0, "ar1 needs |phi| < 1")?;
            check_param(sigma >= 0.0 && sigma.is_finite(), "ar1 needs a finite sigma >= 0")?;
            let mut x = sigma / (1.0 - phi * phi).sqrt() * normal();
            (0..n)
                .map(|_| {
                    let v = x;
                    x = phi * x + sigma * normal();
                    v
                })
                .collect()
        }
        Family::Sinusoid { period, amplitude, noise } => {
            check_param(period >= 2.0, "period must be at least 2")?;
            check_param(noise >= 0.0 && noise.is_finite(), "noise must be a finite value >= 0")?;
            (0..n)
                .map(|t| {
                    let e = if noise > 0.0 { noise * normal() } else { 0.0 };
                    amplitude * (2.0 * PI * t as f64 / period).sin() + e
                })
                .collect()
        }
        Family::RandomWalk { sigma } => {
            check_param(sigma >= 0.0 && sigma.is_finite(), "random walk needs a finite sigma >= 0")?;
            let mut x = 0.0;
            (0..n)
                .map(|_| {
                    let v = x;
                    x += sigma * normal();
                    v
                })
                .collect()
        }
        Family::SquareWave { period } => {
            check_param(period >= 2.0, "period must be at least 2")?;
            (0..n).map(|t| if (t as f64 % period) < period / 2.0 { 1.0 } else { -1.0 }).collect()
        }
        Family::Line { slope } => (0..n).map(|t| slope * t as f64).collect(),
    };
    TimeSeries::new(values)
}
