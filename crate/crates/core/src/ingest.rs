//! CSV loading for single users and cohorts.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::{Path, PathBuf};

use chrono::{Days, NaiveDate};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::model::{ModelError, Observation, TimeSeries};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("column `{0}` not found in header")]
    MissingColumn(String),
    #[error("row {row}, column `{column}`: cannot parse `{value}` as a number")]
    UnparseableValue {
        row: u64,
        column: String,
        value: String,
    },
    #[error("row {row}: cannot parse date `{value}`")]
    UnparseableDate { row: u64, value: String },
    #[error("column `{0}` has no values")]
    EmptySeries(String),
    #[error(transparent)]
    Series(#[from] ModelError),
    #[error("bad file pattern: {0}")]
    Pattern(String),
    #[error("no user files matched in {0}")]
    EmptyCohort(PathBuf),
    #[error("user `{user}`: {source}")]
    User {
        user: String,
        source: Box<IngestError>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsvOptions {
    pub date_column: String,
    /// Columns to load, in output order; empty loads every non-date column.
    pub attributes: Vec<String>,
    /// Day 0 when the date column holds integer indices.
    pub epoch: NaiveDate,
}

impl CsvOptions {
    pub fn new(date_column: impl Into<String>, attributes: Vec<String>) -> Self {
        Self {
            date_column: date_column.into(),
            attributes,
            epoch: default_epoch(),
        }
    }
}

/// 2020-01-06, a Monday.
pub fn default_epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(2020, 1, 6).expect("valid date")
}

fn parse_date(raw: &str, epoch: NaiveDate) -> Option<NaiveDate> {
    let raw = raw.trim();
    if let Ok(d) = NaiveDate::parse_from_str(raw, "%Y-%m-%d") {
        return Some(d);
    }
    let i: i64 = raw.parse().ok()?;
    if i >= 0 {
        epoch.checked_add_days(Days::new(i as u64))
    } else {
        epoch.checked_sub_days(Days::new(i.unsigned_abs()))
    }
}

/// Parses CSV text. Empty cells are skipped for their column only.
pub fn parse_csv<R: Read>(reader: R, opts: &CsvOptions) -> Result<Vec<TimeSeries>, IngestError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr.headers()?.clone();
    let find = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| IngestError::MissingColumn(name.to_string()))
    };
    let date_idx = find(&opts.date_column)?;
    let attributes: Vec<String> = if opts.attributes.is_empty() {
        headers
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != date_idx)
            .map(|(_, h)| h.to_string())
            .collect()
    } else {
        opts.attributes.clone()
    };
    let cols = attributes
        .iter()
        .map(|a| find(a))
        .collect::<Result<Vec<_>, _>>()?;
    let mut points: Vec<Vec<Observation>> = vec![Vec::new(); cols.len()];
    for record in rdr.records() {
        let record = record?;
        let row = record.position().map(|p| p.line()).unwrap_or(0);
        let raw_date = record.get(date_idx).unwrap_or("");
        let date = parse_date(raw_date, opts.epoch).ok_or_else(|| IngestError::UnparseableDate {
            row,
            value: raw_date.to_string(),
        })?;
        for (k, &c) in cols.iter().enumerate() {
            let cell = record.get(c).unwrap_or("");
            if cell.is_empty() {
                continue;
            }
            let value: f64 = cell.parse().map_err(|_| IngestError::UnparseableValue {
                row,
                column: attributes[k].clone(),
                value: cell.to_string(),
            })?;
            if !value.is_finite() {
                return Err(IngestError::UnparseableValue {
                    row,
                    column: attributes[k].clone(),
                    value: cell.to_string(),
                });
            }
            points[k].push(Observation { date, value });
        }
    }
    attributes
        .into_iter()
        .zip(points)
        .map(|(name, pts)| {
            if pts.is_empty() {
                Err(IngestError::EmptySeries(name))
            } else {
                Ok(TimeSeries::new(name, "", pts)?)
            }
        })
        .collect()
}

pub fn load_csv(path: &Path, opts: &CsvOptions) -> Result<Vec<TimeSeries>, IngestError> {
    let file = std::fs::File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_csv(std::io::BufReader::new(file), opts)
}

/// Per-user attribute series, keyed by user id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Dataset {
    pub users: BTreeMap<String, Vec<TimeSeries>>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.users.len()
    }

    pub fn is_empty(&self) -> bool {
        self.users.is_empty()
    }
}

/// Distinct logged dates across all of a user's series.
pub fn logged_days(series: &[TimeSeries]) -> usize {
    series
        .iter()
        .flat_map(|s| s.points().iter().map(|p| p.date))
        .collect::<BTreeSet<_>>()
        .len()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CohortLoad {
    pub dataset: Dataset,
    /// Users dropped by the minimum-days filter, with their day counts.
    pub excluded: Vec<(String, usize)>,
}

/// Loads every file in `dir` matching `pattern` (for example `*.csv`). The
/// user id is the file stem. Users with fewer than `min_days` logged days
/// are excluded.
pub fn load_cohort(
    dir: &Path,
    pattern: &str,
    opts: &CsvOptions,
    min_days: usize,
) -> Result<CohortLoad, IngestError> {
    let full = dir.join(pattern);
    let paths: Vec<PathBuf> = glob::glob(&full.to_string_lossy())
        .map_err(|e| IngestError::Pattern(e.to_string()))?
        .filter_map(Result::ok)
        .filter(|p| p.is_file())
        .collect();
    if paths.is_empty() {
        return Err(IngestError::EmptyCohort(dir.to_path_buf()));
    }
    let loaded: Vec<(String, Result<Vec<TimeSeries>, IngestError>)> = paths
        .par_iter()
        .map(|p| {
            let user = p
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            (user, load_csv(p, opts))
        })
        .collect();
    let mut out = CohortLoad::default();
    for (user, result) in loaded {
        let series = result.map_err(|e| IngestError::User {
            user: user.clone(),
            source: Box::new(e),
        })?;
        let days = logged_days(&series);
        if days < min_days {
            out.excluded.push((user, days));
        } else {
            out.dataset.users.insert(user, series);
        }
    }
    out.excluded.sort();
    Ok(out)
}
