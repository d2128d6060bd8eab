use alloc::string::String;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("time series needs at least 2 samples, got {0}")]
    TooShort(usize),
    #[error("non-finite sample at index {index}")]
    NonFinite { index: usize },
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("empty input")]
    Empty,
    #[error("zero range: NRMSE undefined")]
    ZeroRange,
    #[error("zero denominator in MAPE at index {index}")]
    ZeroDenominator { index: usize },
    /// Lags are 1-based in diagnostics.
    #[error("degenerate ACF at lag {lag}")]
    DegenerateAcf { lag: usize },
    #[error("singular DL step at lag {lag}")]
    SingularRecursion { lag: usize },
    #[error("series too short for window/lag configuration")]
    ShortForWindow,
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("cannot reach target compression ratio {target} (achieved {achieved})")]
    TargetUnreachable { target: f64, achieved: f64 },
    #[error("malformed compressed series: {0}")]
    Format(String),
}
