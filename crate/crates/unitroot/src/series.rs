//! Time-series container, CSV ingestion, centering, and the sufficient
//! statistics (a, b, c) that feed every estimator in the crate.

use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};

/// Neumaier compensated summation: exact to within one rounding of the
/// true sum for any input ordering. Quantile estimates downstream are
/// sensitive to low-order bits when n runs into the millions, so all
/// statistic-level accumulations go through this.
pub(crate) fn neumaier_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut acc = NeumaierAcc::default();
    for v in values {
        acc.add(v);
    }
    acc.value()
}

/// Streaming form of the compensated sum, for single-pass loops that feed
/// several accumulators at once.
#[derive(Debug, Default, Clone, Copy)]
pub(crate) struct NeumaierAcc {
    sum: f64,
    comp: f64,
}

impl NeumaierAcc {
    pub(crate) fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    pub(crate) fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

/// An ordered sequence of finite real observations.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    values: Vec<f64>,
}

/// A series with its sample mean subtracted, retaining the mean.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredSeries {
    values: Vec<f64>,
    /// The subtracted sample mean of the original series.
    pub mean: f64,
}

/// The sufficient statistics of the exact AR(1) likelihood:
/// a = sum_{t=1..n} z_t^2, b = sum_{t=2..n} z_t z_{t-1},
/// c = sum_{t=2..n-1} z_t^2, together with the length n.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuffStats {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub n: usize,
}

impl Series {
    /// Builds a series from raw values, validating finiteness and non-emptiness.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::ParseError {
                line: pos + 1,
                token: values[pos].to_string(),
            });
        }
        Ok(Series { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

impl CenteredSeries {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }
}

/// Column selector for [`load_series`]: positional index or header name.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnSel {
    Index(usize),
    Name(String),
}

impl Default for ColumnSel {
    fn default() -> Self {
        ColumnSel::Index(0)
    }
}

impl std::str::FromStr for ColumnSel {
    type Err = std::convert::Infallible;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Ok(match s.parse::<usize>() {
            Ok(i) => ColumnSel::Index(i),
            Err(_) => ColumnSel::Name(s.to_string()),
        })
    }
}

/// Loads a series from a CSV file: one record per line, `#` comment lines
/// ignored, optional single header row auto-detected (a first row whose
/// selected field does not parse as a number). `column` defaults to index 0.
pub fn load_series(path: &Path, column: Option<ColumnSel>) -> Result<Series> {
    let mut file = std::fs::File::open(path).map_err(|source| Error::FileNotFound {
        path: path.to_path_buf(),
        source,
    })?;
    let mut text = String::new();
    file.read_to_string(&mut text)
        .map_err(|source| Error::FileNotFound {
            path: path.to_path_buf(),
            source,
        })?;
    parse_series(&text, column.unwrap_or_default())
}

/// Parses CSV text per the [`load_series`] contract. Exposed separately so
/// non-file frontends (tests, the browser demo) share the ingestion rules.
pub fn parse_series(text: &str, column: ColumnSel) -> Result<Series> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    // Collect records with their 1-based line numbers for error reporting.
    let mut rows: Vec<(usize, csv::StringRecord)> = Vec::new();
    for rec in reader.records() {
        let rec = rec.map_err(|e| Error::ParseError {
            line: e
                .position()
                .map(|p| p.line() as usize)
                .unwrap_or(rows.len() + 1),
            token: e.to_string(),
        })?;
        if rec.iter().all(|f| f.is_empty()) {
            continue;
        }
        let line = rec.position().map(|p| p.line() as usize).unwrap_or(0);
        rows.push((line, rec));
    }
    if rows.is_empty() {
        return Err(Error::EmptySeries);
    }

    // Header detection: the first row is a header iff any of its fields fails
    // numeric parse. A named column additionally requires that header row.
    let first_is_header = rows[0].1.iter().any(|f| f.parse::<f64>().is_err());
    let col_index = match &column {
        ColumnSel::Index(i) => *i,
        ColumnSel::Name(name) => {
            if !first_is_header {
                return Err(Error::ParseError {
                    line: rows[0].0,
                    token: format!("no header row to resolve column {name:?}"),
                });
            }
            rows[0]
                .1
                .iter()
                .position(|f| f == name)
                .ok_or_else(|| Error::ParseError {
                    line: rows[0].0,
                    token: format!("column {name:?} not found in header"),
                })?
        }
    };

    let data_rows = if first_is_header {
        &rows[1..]
    } else {
        &rows[..]
    };
    let mut values = Vec::with_capacity(data_rows.len());
    for (line, rec) in data_rows {
        let field = rec.get(col_index).ok_or_else(|| Error::ParseError {
            line: *line,
            token: format!("missing column {col_index}"),
        })?;
        let v: f64 = field.parse().map_err(|_| Error::ParseError {
            line: *line,
            token: field.to_string(),
        })?;
        if !v.is_finite() {
            return Err(Error::ParseError {
                line: *line,
                token: field.to_string(),
            });
        }
        values.push(v);
    }
    if values.is_empty() {
        return Err(Error::EmptySeries);
    }
    Ok(Series { values })
}

/// Subtracts the sample mean.
pub fn center(s: &Series) -> CenteredSeries {
    let n = s.n() as f64;
    let mean = neumaier_sum(s.values.iter().copied()) / n;
    let values = s.values.iter().map(|v| v - mean).collect();
    CenteredSeries { values, mean }
}

/// Computes the sufficient statistics over the exact index ranges:
/// a over t = 1..n, b over t = 2..n, c over t = 2..n-1.
pub fn suffstats(values: &[f64]) -> Result<SuffStats> {
    let n = values.len();
    if n < 3 {
        return Err(Error::SeriesTooShort { n, min: 3 });
    }
    let a = neumaier_sum(values.iter().map(|z| z * z));
    let b = neumaier_sum(values.windows(2).map(|w| w[0] * w[1]));
    let c = neumaier_sum(values[1..n - 1].iter().map(|z| z * z));
    Ok(SuffStats { a, b, c, n })
}

impl SuffStats {
    /// Validating constructor for synthetic statistics (tests, adapters).
    pub fn new(a: f64, b: f64, c: f64, n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::SeriesTooShort { n, min: 3 });
        }
        if !(a.is_finite() && b.is_finite() && c.is_finite()) || a < 0.0 || c < 0.0 || c > a {
            return Err(Error::DomainError(format!(
                "invalid sufficient statistics: a={a}, b={b}, c={c} (need 0 <= c <= a)"
            )));
        }
        Ok(SuffStats { a, b, c, n })
    }
}
