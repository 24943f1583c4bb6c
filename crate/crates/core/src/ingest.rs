//! CSV ingestion and re-quantization of real-valued columns to 16-bit
//! integers.

use std::fmt;
use std::io::{Read, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Real;
use crate::series::TimeSeries;

const Q_MIN: i32 = i16::MIN as i32;
const Q_MAX: i32 = i16::MAX as i32;
const Q_STEPS: f64 = 65535.0;

/// What it takes to map quantized samples back to the original scale.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuantMeta<F> {
    pub min: F,
    pub max: F,
    /// Original units per quantization step; zero for a constant column.
    pub scale: F,
    /// Set when the column was already integral and in range, so samples are
    /// the original values.
    pub identity: bool,
}

impl<F: Real> QuantMeta<F> {
    pub fn identity() -> Self {
        QuantMeta {
            min: F::zero(),
            max: F::zero(),
            scale: F::one(),
            identity: true,
        }
    }

    pub fn dequantize(&self, q: i32) -> F {
        let qf = F::of_i64(q as i64);
        if self.identity {
            return qf;
        }
        if self.scale == F::zero() {
            return self.min;
        }
        self.min + (qf - F::of_i64(Q_MIN as i64)) * self.scale
    }
}

fn non_finite_rows<F: Real>(values: &[F]) -> Vec<usize> {
    values
        .iter()
        .enumerate()
        .filter(|(_, v)| !v.is_finite())
        .map(|(i, _)| i)
        .collect()
}

/// `floor((x - lo) * 65535 / (hi - lo)) - 32768`, clamped to the 16-bit range.
/// A constant column maps to all zeros.
pub fn quantize_column<F: Real>(values: &[F]) -> Result<(TimeSeries, QuantMeta<F>)> {
    if values.is_empty() {
        return Err(Error::EmptyInput);
    }
    let bad = non_finite_rows(values);
    if !bad.is_empty() {
        return Err(Error::NonFinite(bad));
    }
    let lo = values.iter().copied().fold(F::infinity(), F::min);
    let hi = values.iter().copied().fold(F::neg_infinity(), F::max);
    if hi == lo {
        let meta = QuantMeta {
            min: lo,
            max: hi,
            scale: F::zero(),
            identity: false,
        };
        return Ok((TimeSeries::new(vec![0; values.len()]), meta));
    }
    let span = hi - lo;
    let steps = F::of_f64(Q_STEPS);
    let samples = values
        .iter()
        .map(|&x| {
            let q = ((x - lo) * steps / span)
                .floor()
                .to_i64()
                .unwrap_or(i64::MAX)
                + Q_MIN as i64;
            q.clamp(Q_MIN as i64, Q_MAX as i64) as i32
        })
        .collect();
    let meta = QuantMeta {
        min: lo,
        max: hi,
        scale: span / steps,
        identity: false,
    };
    Ok((TimeSeries::new(samples), meta))
}

/// Integral values inside the 16-bit range pass through unchanged; anything
/// else is quantized.
pub fn quantize_or_pass<F: Real>(values: &[F]) -> Result<(TimeSeries, QuantMeta<F>)> {
    let passthrough = !values.is_empty()
        && values.iter().all(|v| {
            v.is_finite()
                && v.fract() == F::zero()
                && *v >= F::of_i64(Q_MIN as i64)
                && *v <= F::of_i64(Q_MAX as i64)
        });
    if passthrough {
        let samples = values.iter().map(|v| v.to_i32().unwrap()).collect();
        return Ok((TimeSeries::new(samples), QuantMeta::identity()));
    }
    quantize_column(values)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    pub name: String,
    pub channels: Vec<TimeSeries>,
    pub provenance: Vec<PathBuf>,
    pub quantization: Vec<QuantMeta<f64>>,
    /// Rows dropped because of missing cells.
    pub dropped_rows: usize,
}

impl Dataset {
    /// Wraps already-integer channels (synthetic data, decoded containers).
    pub fn from_channels(name: impl Into<String>, channels: Vec<TimeSeries>) -> Self {
        let quantization = vec![QuantMeta::identity(); channels.len()];
        Dataset {
            name: name.into(),
            channels,
            provenance: Vec::new(),
            quantization,
            dropped_rows: 0,
        }
    }

    pub fn total_samples(&self) -> usize {
        self.channels.iter().map(|c| c.len()).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ColumnSelector {
    Index(usize),
    Name(String),
}

impl FromStr for ColumnSelector {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.is_empty() {
            return Err(Error::InvalidParameter("empty column selector".into()));
        }
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnSelector::Index(i),
            Err(_) => ColumnSelector::Name(s.to_string()),
        })
    }
}

impl fmt::Display for ColumnSelector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ColumnSelector::Index(i) => write!(f, "{i}"),
            ColumnSelector::Name(n) => f.write_str(n),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum HeaderMode {
    /// Header present when any cell of the first row is not numeric.
    #[default]
    Auto,
    Present,
    Absent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    #[default]
    DropRow,
    Error,
}

impl FromStr for MissingPolicy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "drop" | "drop-row" => Ok(MissingPolicy::DropRow),
            "error" => Ok(MissingPolicy::Error),
            other => Err(Error::InvalidParameter(format!(
                "missing-value policy {other:?} (expected drop-row or error)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct CsvOptions {
    /// Empty selects every column.
    pub columns: Vec<ColumnSelector>,
    pub header: HeaderMode,
    pub missing: MissingPolicy,
}

fn is_missing(cell: &str) -> bool {
    let c = cell.trim();
    c.is_empty() || c.eq_ignore_ascii_case("nan") || c.eq_ignore_ascii_case("na")
}

fn looks_numeric(cell: &str) -> bool {
    is_missing(cell) || cell.trim().parse::<f64>().is_ok()
}

fn resolve_columns(
    selectors: &[ColumnSelector],
    header: Option<&[String]>,
    width: usize,
) -> Result<Vec<(usize, String)>> {
    let label = |i: usize| match header {
        Some(h) => h[i].clone(),
        None => format!("col{i}"),
    };
    if selectors.is_empty() {
        return Ok((0..width).map(|i| (i, label(i))).collect());
    }
    selectors
        .iter()
        .map(|sel| {
            let idx = match sel {
                ColumnSelector::Index(i) if *i < width => Some(*i),
                ColumnSelector::Index(_) => None,
                ColumnSelector::Name(n) => {
                    header.and_then(|h| h.iter().position(|c| c.trim() == n))
                }
            };
            idx.map(|i| (i, label(i)))
                .ok_or_else(|| Error::InvalidParameter(format!("column {sel} not found")))
        })
        .collect()
}

/// Reads numeric columns from CSV text. Row numbers in errors are 1-based
/// file lines.
pub fn read_csv<R: Read>(reader: R, name: &str, options: &CsvOptions) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut records = rdr.records();
    let csv_err = |e: csv::Error| Error::Csv {
        row: e.position().map(|p| p.line() as usize).unwrap_or(0),
        column: String::new(),
        message: e.to_string(),
    };

    let first = match records.next() {
        Some(r) => r.map_err(csv_err)?,
        None => return Err(Error::EmptyInput),
    };
    let width = first.len();
    let first_line = first.position().map(|p| p.line() as usize).unwrap_or(1);
    let has_header = match options.header {
        HeaderMode::Present => true,
        HeaderMode::Absent => false,
        HeaderMode::Auto => !first.iter().all(looks_numeric),
    };
    let header: Option<Vec<String>> =
        has_header.then(|| first.iter().map(|s| s.trim().to_string()).collect());
    let columns = resolve_columns(&options.columns, header.as_deref(), width)?;

    let mut values: Vec<Vec<f64>> = vec![Vec::new(); columns.len()];
    let mut dropped = 0;
    let mut handle = |record: &csv::StringRecord, line: usize| -> Result<()> {
        let mut row = Vec::with_capacity(columns.len());
        for (col, label) in &columns {
            let cell = record.get(*col).unwrap_or("");
            if is_missing(cell) {
                if options.missing == MissingPolicy::Error {
                    return Err(Error::Csv {
                        row: line,
                        column: label.clone(),
                        message: format!("missing value {:?}", cell.trim()),
                    });
                }
                dropped += 1;
                return Ok(());
            }
            let v: f64 = cell.trim().parse().map_err(|_| Error::Csv {
                row: line,
                column: label.clone(),
                message: format!("not a number: {:?}", cell.trim()),
            })?;
            if !v.is_finite() {
                return Err(Error::Csv {
                    row: line,
                    column: label.clone(),
                    message: format!("non-finite value {:?}", cell.trim()),
                });
            }
            row.push(v);
        }
        for (dst, v) in values.iter_mut().zip(row) {
            dst.push(v);
        }
        Ok(())
    };

    if !has_header {
        handle(&first, first_line)?;
    }
    for rec in records {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        handle(&rec, line)?;
    }

    let mut channels = Vec::with_capacity(columns.len());
    let mut quantization = Vec::with_capacity(columns.len());
    for (i, col) in values.iter().enumerate() {
        let (mut series, meta) = if col.is_empty() {
            (TimeSeries::default(), QuantMeta::identity())
        } else {
            quantize_or_pass(col)?
        };
        series.channel_id = i as u16;
        channels.push(series);
        quantization.push(meta);
    }
    Ok(Dataset {
        name: name.to_string(),
        channels,
        provenance: Vec::new(),
        quantization,
        dropped_rows: dropped,
    })
}

pub fn load_csv(path: impl AsRef<Path>, options: &CsvOptions) -> Result<Dataset> {
    let path = path.as_ref();
    let file = std::fs::File::open(path)?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".into());
    let mut ds = read_csv(std::io::BufReader::new(file), &name, options)?;
    ds.provenance.push(path.to_path_buf());
    Ok(ds)
}

/// Writes channels as CSV columns with a header row. Shorter channels leave
/// trailing cells empty.
pub fn write_csv<W: Write>(writer: W, channels: &[TimeSeries], names: &[String]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let header: Vec<String> = (0..channels.len())
        .map(|i| names.get(i).cloned().unwrap_or_else(|| format!("ch{i}")))
        .collect();
    let io = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(&header).map_err(io)?;
    let rows = channels.iter().map(|c| c.len()).max().unwrap_or(0);
    for r in 0..rows {
        let row: Vec<String> = channels
            .iter()
            .map(|c| c.get(r).map(|v| v.to_string()).unwrap_or_default())
            .collect();
        w.write_record(&row).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn endpoints_and_constant() {
        let (s, m) = quantize_column(&[0.0f64, 0.5, 1.0]).unwrap();
        assert_eq!(s.samples, vec![-32768, -1, 32767]);
        assert!(!m.identity);
        let (s, _) = quantize_column(&[3.25f32; 4]).unwrap();
        assert_eq!(s.samples, vec![0; 4]);
    }

    #[test]
    fn non_finite_rows_reported() {
        let err = quantize_column(&[1.0, f64::NAN, 2.0, f64::INFINITY]).unwrap_err();
        assert!(matches!(err, Error::NonFinite(rows) if rows == vec![1, 3]));
        assert!(matches!(
            quantize_column::<f64>(&[]),
            Err(Error::EmptyInput)
        ));
    }

    #[test]
    fn error_bound() {
        let xs: Vec<f64> = (0..1000)
            .map(|i| (i as f64 * 0.37).sin() * 12.5 + 3.0)
            .collect();
        let (s, m) = quantize_column(&xs).unwrap();
        let step = (m.max - m.min) / 65535.0;
        for (&x, &q) in xs.iter().zip(s.iter()) {
            assert!((m.dequantize(q) - x).abs() <= step + 1e-12);
        }
    }

    #[test]
    fn csv_two_columns() {
        let text = "a,b\n1.5,2\n2.5,3\n3.5,4\n";
        let ds = read_csv(text.as_bytes(), "t", &CsvOptions::default()).unwrap();
        assert_eq!(ds.channels.len(), 2);
        assert!(ds.channels.iter().all(|c| c.len() == 3));
        assert!(!ds.quantization[0].identity);
        assert!(ds.quantization[1].identity);
        assert_eq!(ds.channels[1].samples, vec![2, 3, 4]);
    }

    #[test]
    fn csv_missing_policies() {
        let text = "x,y\n1,2\nNaN,3\n4,5\n";
        let ds = read_csv(text.as_bytes(), "t", &CsvOptions::default()).unwrap();
        assert_eq!(ds.dropped_rows, 1);
        assert_eq!(ds.channels[0].samples, vec![1, 4]);
        let opts = CsvOptions {
            missing: MissingPolicy::Error,
            ..Default::default()
        };
        let err = read_csv(text.as_bytes(), "t", &opts).unwrap_err();
        assert!(matches!(err, Error::Csv { row: 3, ref column, .. } if column == "x"));
    }

    #[test]
    fn csv_selection_and_bad_cells() {
        let text = "t,v,w\n0,10,x\n1,11,7\n";
        let opts = CsvOptions {
            columns: vec!["v".parse().unwrap(), "0".parse().unwrap()],
            ..Default::default()
        };
        let ds = read_csv(text.as_bytes(), "t", &opts).unwrap();
        assert_eq!(ds.channels[0].samples, vec![10, 11]);
        assert_eq!(ds.channels[1].samples, vec![0, 1]);
        let err = read_csv(text.as_bytes(), "t", &CsvOptions::default()).unwrap_err();
        assert!(matches!(err, Error::Csv { row: 2, ref column, .. } if column == "w"));
    }
}
