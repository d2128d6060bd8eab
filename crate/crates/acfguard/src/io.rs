//! CSV input, the binary compressed-file format, and CSV writers for
//! reconstructions, segments and Fourier coefficients.
//!
//! Compressed file layout, all little-endian:
//!
//! | bytes | field |
//! |---|---|
//! | 6 | magic `CAMEO1` |
//! | 2 | version (1) |
//! | 8 | `n` |
//! | 8 | kept count |
//! | 1 | statistic (0 ACF, 1 PACF) |
//! | 1 | metric code |
//! | 4 | lags |
//! | 4 | window |
//! | 8 | epsilon (f64) |
//! | 16 each | kept records: 1-based index (u64), value (f64) |

use std::fmt::Write as _;
use std::io::{Read, Write};
use std::path::Path;

use acfguard_core::baselines::{DftCoefficients, ParametricOutput, SegmentList};
use acfguard_core::{AggKind, CompressedSeries, KeptPoint, QualityMeasure, StatKind, TimeSeries};
use thiserror::Error;

pub const MAGIC: &[u8; 6] = b"CAMEO1";
pub const VERSION: u16 = 1;
const HEADER_LEN: usize = 6 + 2 + 8 + 8 + 1 + 1 + 4 + 4 + 8;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("{0}")]
    Column(String),
    #[error("compressed file: {0}")]
    Format(String),
    #[error(transparent)]
    Core(#[from] acfguard_core::Error),
}

pub type IoResult<T> = std::result::Result<T, IoError>;

/// Which CSV column holds the series.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Column {
    /// 0-based.
    Index(usize),
    /// Matched against the header row.
    Name(String),
}

impl Default for Column {
    fn default() -> Self {
        Column::Index(0)
    }
}

impl std::str::FromStr for Column {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => Column::Index(i),
            Err(_) => Column::Name(s.to_string()),
        })
    }
}

pub fn load_csv(path: &Path, column: &Column) -> IoResult<TimeSeries> {
    parse_csv(&std::fs::read_to_string(path)?, column)
}

/// Parses one column of comma-separated text. The first non-empty row is
/// a header when its selected cell is not a number; a named column needs
/// one. Blank lines are ignored.
pub fn parse_csv(text: &str, column: &Column) -> IoResult<TimeSeries> {
    let mut rows = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
        .peekable();
    let cells = |l: &str| l.split(',').map(str::trim).map(String::from).collect::<Vec<_>>();
    let col = match column {
        Column::Index(i) => {
            if let Some(&(_, first)) = rows.peek() {
                if cells(first).get(*i).is_some_and(|c| c.parse::<f64>().is_err()) {
                    rows.next();
                }
            }
            *i
        }
        Column::Name(name) => {
            let (_, header) = rows.next().ok_or_else(|| IoError::Column("empty input has no header".into()))?;
            cells(header)
                .iter()
                .position(|c| c.trim_matches('"') == name)
                .ok_or_else(|| IoError::Column(format!("no column named {name:?} in header")))?
        }
    };
    let mut values = Vec::new();
    for (line, l) in rows {
        let row = cells(l);
        let cell = row.get(col).filter(|c| !c.is_empty()).ok_or_else(|| IoError::Parse {
            line,
            column: col + 1,
            message: "missing value".into(),
        })?;
        let v: f64 = cell.parse().map_err(|_| IoError::Parse {
            line,
            column: col + 1,
            message: format!("not a number: {cell:?}"),
        })?;
        if !v.is_finite() {
            return Err(IoError::Parse { line, column: col + 1, message: format!("non-finite value {cell}") });
        }
        values.push(v);
    }
    Ok(TimeSeries::new(values)?)
}

/// One value per line, shortest round-trip formatting.
pub fn write_values(w: &mut impl Write, values: &[f64]) -> IoResult<()> {
    let mut out = String::with_capacity(values.len() * 20);
    for v in values {
        writeln!(out, "{v:?}").unwrap();
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

pub fn encode(cs: &CompressedSeries) -> IoResult<Vec<u8>> {
    cs.validate()?;
    let mut b = Vec::with_capacity(HEADER_LEN + 16 * cs.kept.len());
    b.extend_from_slice(MAGIC);
    b.extend_from_slice(&VERSION.to_le_bytes());
    b.extend_from_slice(&cs.original_length.to_le_bytes());
    b.extend_from_slice(&(cs.kept.len() as u64).to_le_bytes());
    b.push(cs.stat.code());
    b.push(cs.metric.code());
    b.extend_from_slice(&cs.lags.to_le_bytes());
    b.extend_from_slice(&cs.window.to_le_bytes());
    b.extend_from_slice(&cs.epsilon.to_le_bytes());
    for p in &cs.kept {
        b.extend_from_slice(&p.index.to_le_bytes());
        b.extend_from_slice(&p.value.to_le_bytes());
    }
    Ok(b)
}

struct Cursor<'a>(&'a [u8]);

impl Cursor<'_> {
    fn take<const N: usize>(&mut self, what: &str) -> IoResult<[u8; N]> {
        if self.0.len() < N {
            return Err(IoError::Format(format!("truncated at {what}")));
        }
        let (head, rest) = self.0.split_at(N);
        self.0 = rest;
        Ok(head.try_into().unwrap())
    }
}

/// Inverse of [`encode`]. The window aggregate kind is not stored; it reads
/// back as `none` for window 1 and `mean` otherwise.
pub fn decode(bytes: &[u8]) -> IoResult<CompressedSeries> {
    let mut c = Cursor(bytes);
    if &c.take::<6>("magic")? != MAGIC {
        return Err(IoError::Format("bad magic".into()));
    }
    let version = u16::from_le_bytes(c.take("version")?);
    if version != VERSION {
        return Err(IoError::Format(format!("unsupported version {version}")));
    }
    let n = u64::from_le_bytes(c.take("length")?);
    let n_kept = u64::from_le_bytes(c.take("kept count")?);
    let stat_code = c.take::<1>("statistic")?[0];
    let stat =
        StatKind::from_code(stat_code).ok_or_else(|| IoError::Format(format!("unknown statistic {stat_code}")))?;
    let metric_code = c.take::<1>("metric")?[0];
    let metric = QualityMeasure::from_code(metric_code)
        .ok_or_else(|| IoError::Format(format!("unknown metric {metric_code}")))?;
    let lags = u32::from_le_bytes(c.take("lags")?);
    let window = u32::from_le_bytes(c.take("window")?);
    let epsilon = f64::from_le_bytes(c.take("epsilon")?);
    if (c.0.len() as u64) != n_kept.saturating_mul(16) {
        return Err(IoError::Format(format!("payload holds {} bytes, header announces {n_kept} records", c.0.len())));
    }
    let mut kept = Vec::with_capacity(n_kept as usize);
    for _ in 0..n_kept {
        let index = u64::from_le_bytes(c.take("record")?);
        let value = f64::from_le_bytes(c.take("record")?);
        kept.push(KeptPoint { index, value });
    }
    let cs = CompressedSeries {
        kept,
        original_length: n,
        stat,
        lags,
        window,
        agg: if window == 1 { AggKind::None } else { AggKind::Mean },
        epsilon,
        metric,
    };
    cs.validate()?;
    Ok(cs)
}

pub fn write_compressed(path: &Path, cs: &CompressedSeries) -> IoResult<()> {
    std::fs::write(path, encode(cs)?)?;
    Ok(())
}

pub fn read_compressed(path: &Path) -> IoResult<CompressedSeries> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)?.read_to_end(&mut bytes)?;
    decode(&bytes)
}

/// `start,end,first_value,last_value` per segment, 1-based inclusive.
pub fn write_segments(w: &mut impl Write, list: &SegmentList) -> IoResult<()> {
    let mut out = String::from("start,end,first_value,last_value\n");
    for s in &list.segments {
        writeln!(out, "{},{},{:?},{:?}", s.start + 1, s.end + 1, s.first_value, s.last_value).unwrap();
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

/// `n` on the first line after the header, then `frequency,re,im` per bin.
pub fn write_coefficients(w: &mut impl Write, c: &DftCoefficients) -> IoResult<()> {
    let mut out = format!("n,{}\nfrequency,re,im\n", c.n);
    for (f, re, im) in &c.bins {
        writeln!(out, "{f},{re:?},{im:?}").unwrap();
    }
    w.write_all(out.as_bytes())?;
    Ok(())
}

pub fn write_parametric(w: &mut impl Write, out: &ParametricOutput) -> IoResult<()> {
    match out {
        ParametricOutput::Segments(s) => write_segments(w, s),
        ParametricOutput::Coefficients(c) => write_coefficients(w, c),
    }
}
