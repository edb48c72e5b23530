//! SAX discretization: z-normalization, PAA, Gaussian breakpoints and
//! raw-value range bins.

use chrono::{Datelike, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::model::{Granularity, GranularityKind, Letter, TimeSeries, WindowMode};

#[derive(Debug, Error, PartialEq)]
pub enum DiscretizeError {
    #[error("series is degenerate (fewer than 2 points or zero standard deviation)")]
    DegenerateSeries,
    #[error("alphabet size {0} is outside 2..=26")]
    InvalidAlphabet(usize),
    #[error("invalid binning scheme: {0}")]
    InvalidScheme(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BinningMode {
    SaxGaussian,
    RawRanges,
}

/// One raw-range bin as stored in vocabulary files. `upper_bound` is
/// exclusive; `None` means unbounded.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RangeBin {
    pub upper_bound: Option<f64>,
    pub label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinningScheme {
    mode: BinningMode,
    breakpoints: Vec<f64>,
    labels: Vec<String>,
}

impl BinningScheme {
    pub fn sax(alphabet_size: usize, labels: Vec<String>) -> Result<Self, DiscretizeError> {
        let breakpoints = gaussian_breakpoints(alphabet_size)?;
        Self::build(BinningMode::SaxGaussian, breakpoints, labels)
    }

    pub fn raw_ranges(breakpoints: Vec<f64>, labels: Vec<String>) -> Result<Self, DiscretizeError> {
        Self::build(BinningMode::RawRanges, breakpoints, labels)
    }

    fn build(
        mode: BinningMode,
        breakpoints: Vec<f64>,
        labels: Vec<String>,
    ) -> Result<Self, DiscretizeError> {
        let n = breakpoints.len() + 1;
        if !(2..=26).contains(&n) {
            return Err(DiscretizeError::InvalidAlphabet(n));
        }
        if labels.len() != n {
            return Err(DiscretizeError::InvalidScheme(format!(
                "{} labels for {} bins",
                labels.len(),
                n
            )));
        }
        if breakpoints.iter().any(|b| !b.is_finite())
            || breakpoints.windows(2).any(|w| w[0] >= w[1])
        {
            return Err(DiscretizeError::InvalidScheme(
                "breakpoints must be finite and strictly ascending".into(),
            ));
        }
        Ok(Self {
            mode,
            breakpoints,
            labels,
        })
    }

    /// Reads bins ordered by upper bound; only the last bin may be unbounded.
    pub fn from_range_bins(bins: &[RangeBin]) -> Result<Self, DiscretizeError> {
        let Some((last, rest)) = bins.split_last() else {
            return Err(DiscretizeError::InvalidScheme("no bins".into()));
        };
        if last.upper_bound.is_some() {
            return Err(DiscretizeError::InvalidScheme(
                "last bin must have a null upper bound".into(),
            ));
        }
        let breakpoints = rest
            .iter()
            .map(|b| {
                b.upper_bound.ok_or_else(|| {
                    DiscretizeError::InvalidScheme("only the last bin may be unbounded".into())
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        let labels = bins.iter().map(|b| b.label.clone()).collect();
        Self::raw_ranges(breakpoints, labels)
    }

    pub fn to_range_bins(&self) -> Vec<RangeBin> {
        self.labels
            .iter()
            .enumerate()
            .map(|(i, label)| RangeBin {
                upper_bound: self.breakpoints.get(i).copied(),
                label: label.clone(),
            })
            .collect()
    }

    pub fn mode(&self) -> BinningMode {
        self.mode
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn alphabet_size(&self) -> usize {
        self.labels.len()
    }

    pub fn label(&self, letter: Letter) -> &str {
        &self.labels[letter.index()]
    }

    pub fn letter_of_label(&self, label: &str) -> Option<Letter> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| Letter(i as u8))
    }

    /// Letter for a value in the scheme's space (normalized for SAX, raw
    /// otherwise). Bins are half-open, so a breakpoint value goes up.
    pub fn letter_for(&self, v: f64) -> Letter {
        Letter(self.breakpoints.partition_point(|&b| b <= v) as u8)
    }

    /// The middle letter, used for constant series.
    pub fn middle_letter(&self) -> Letter {
        Letter((self.alphabet_size() / 2) as u8)
    }
}

/// The (i/n)-quantiles of the standard normal, i = 1..n-1.
pub fn gaussian_breakpoints(alphabet_size: usize) -> Result<Vec<f64>, DiscretizeError> {
    if !(2..=26).contains(&alphabet_size) {
        return Err(DiscretizeError::InvalidAlphabet(alphabet_size));
    }
    let normal = Normal::standard();
    let n = alphabet_size as f64;
    Ok((1..alphabet_size)
        .map(|i| {
            let b = normal.inverse_cdf(i as f64 / n);
            // keep exact symmetry around the median
            if 2 * i == alphabet_size {
                0.0
            } else {
                b
            }
        })
        .collect())
}

/// Mean and sample standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub mean: f64,
    pub sd: f64,
}

impl NormStats {
    pub fn of(values: &[f64]) -> Result<Self, DiscretizeError> {
        if values.len() < 2 {
            return Err(DiscretizeError::DegenerateSeries);
        }
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        let sd = var.sqrt();
        if !(sd > 1e-12 * mean.abs().max(1.0)) {
            return Err(DiscretizeError::DegenerateSeries);
        }
        Ok(Self { mean, sd })
    }

    pub fn normalize(&self, v: f64) -> f64 {
        (v - self.mean) / self.sd
    }

    pub fn denormalize(&self, z: f64) -> f64 {
        self.mean + self.sd * z
    }
}

pub fn z_normalize_values(values: &[f64]) -> Result<Vec<f64>, DiscretizeError> {
    let stats = NormStats::of(values)?;
    Ok(values.iter().map(|&v| stats.normalize(v)).collect())
}

pub fn z_normalize(series: &TimeSeries) -> Result<Vec<f64>, DiscretizeError> {
    z_normalize_values(&series.values())
}

/// Piecewise aggregate approximation over consecutive chunks.
pub fn paa(values: &[f64], segment_len: usize, keep_partial: bool) -> Vec<f64> {
    assert!(segment_len >= 1, "segment length must be at least 1");
    values
        .chunks(segment_len)
        .filter(|c| keep_partial || c.len() == segment_len)
        .map(|c| c.iter().sum::<f64>() / c.len() as f64)
        .collect()
}

/// A window over positions `[start, end)` of a date list.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowSpan {
    /// 1-based window number.
    pub ordinal: usize,
    pub start: usize,
    pub end: usize,
    pub complete: bool,
}

impl WindowSpan {
    pub fn len(&self) -> usize {
        self.end - self.start
    }

    pub fn is_empty(&self) -> bool {
        self.end == self.start
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.start..self.end
    }
}

fn days_in_month(date: NaiveDate) -> usize {
    let (y, m) = (date.year(), date.month());
    let next = if m == 12 {
        NaiveDate::from_ymd_opt(y + 1, 1, 1)
    } else {
        NaiveDate::from_ymd_opt(y, m + 1, 1)
    };
    let first = NaiveDate::from_ymd_opt(y, m, 1).expect("valid month start");
    (next.expect("valid next month") - first).num_days() as usize
}

/// Splits ascending dates into windows.
pub fn partition_windows(
    dates: &[NaiveDate],
    granularity: Granularity,
    mode: WindowMode,
) -> Vec<WindowSpan> {
    if dates.is_empty() {
        return Vec::new();
    }
    let Some(tw) = granularity.tw_len() else {
        return vec![WindowSpan {
            ordinal: 1,
            start: 0,
            end: dates.len(),
            complete: true,
        }];
    };
    match (mode, granularity.kind()) {
        (WindowMode::Calendar, GranularityKind::Week | GranularityKind::Month) => {
            let key = |d: NaiveDate| match granularity.kind() {
                GranularityKind::Week => {
                    let w = d.iso_week();
                    (w.year(), w.week())
                }
                _ => (d.year(), d.month()),
            };
            let mut out = Vec::new();
            let mut start = 0;
            for i in 1..=dates.len() {
                if i == dates.len() || key(dates[i]) != key(dates[start]) {
                    let need = match granularity.kind() {
                        GranularityKind::Week => 7,
                        _ => days_in_month(dates[start]),
                    };
                    out.push(WindowSpan {
                        ordinal: out.len() + 1,
                        start,
                        end: i,
                        complete: i - start == need,
                    });
                    start = i;
                }
            }
            out
        }
        _ => (0..dates.len())
            .step_by(tw)
            .enumerate()
            .map(|(k, start)| {
                let end = (start + tw).min(dates.len());
                WindowSpan {
                    ordinal: k + 1,
                    start,
                    end,
                    complete: end - start == tw,
                }
            })
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolSlot {
    /// 1-based day or window number.
    pub index: usize,
    pub date: NaiveDate,
    pub weekday: Option<Weekday>,
    pub letter: Letter,
}

/// Letters of one attribute at one granularity, plus the raw-value band
/// edges used to draw them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymbolicSeries {
    pub attribute: String,
    pub granularity: Granularity,
    pub symbols: Vec<SymbolSlot>,
    pub scheme: BinningScheme,
    pub raw_band_edges: Vec<f64>,
}

impl SymbolicSeries {
    pub fn letters(&self) -> Vec<Letter> {
        self.symbols.iter().map(|s| s.letter).collect()
    }

    pub fn letter_at(&self, index: usize) -> Option<Letter> {
        self.symbols
            .iter()
            .find(|s| s.index == index)
            .map(|s| s.letter)
    }
}

/// How values are mapped into the scheme's space before binning.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scaling {
    Normalized(NormStats),
    Raw,
    /// Degenerate SAX input: every value maps to the middle letter.
    Constant(f64),
}

impl Scaling {
    pub fn for_series(values: &[f64], scheme: &BinningScheme) -> Result<Self, DiscretizeError> {
        match scheme.mode() {
            BinningMode::RawRanges => Ok(Scaling::Raw),
            BinningMode::SaxGaussian => NormStats::of(values).map(Scaling::Normalized),
        }
    }

    /// Like `for_series` but falls back to a constant mapping for degenerate input.
    pub fn for_series_or_constant(values: &[f64], scheme: &BinningScheme) -> Self {
        Self::for_series(values, scheme).unwrap_or_else(|_| {
            let mean = values.iter().sum::<f64>() / values.len().max(1) as f64;
            Scaling::Constant(mean)
        })
    }

    pub fn letter(&self, scheme: &BinningScheme, v: f64) -> Letter {
        match self {
            Scaling::Normalized(s) => scheme.letter_for(s.normalize(v)),
            Scaling::Raw => scheme.letter_for(v),
            Scaling::Constant(_) => scheme.middle_letter(),
        }
    }

    /// Letter of a window given its raw values (PAA mean).
    pub fn window_letter(&self, scheme: &BinningScheme, raw: &[f64]) -> Letter {
        let mean = raw.iter().sum::<f64>() / raw.len() as f64;
        self.letter(scheme, mean)
    }

    /// Raw-unit y coordinates of each breakpoint.
    pub fn band_edges(&self, scheme: &BinningScheme) -> Vec<f64> {
        match self {
            Scaling::Normalized(s) => scheme
                .breakpoints()
                .iter()
                .map(|&b| s.denormalize(b))
                .collect(),
            Scaling::Raw => scheme.breakpoints().to_vec(),
            Scaling::Constant(mean) => scheme.breakpoints().iter().map(|&b| mean + b).collect(),
        }
    }
}

/// Discretizes a series. Day granularity maps each value; window
/// granularities map the PAA mean of each complete window.
pub fn symbolize(
    series: &TimeSeries,
    granularity: Granularity,
    scheme: &BinningScheme,
    mode: WindowMode,
) -> Result<SymbolicSeries, DiscretizeError> {
    let values = series.values();
    let dates = series.dates();
    let scaling = Scaling::for_series(&values, scheme)?;
    let symbols = if granularity.kind() == GranularityKind::Day {
        dates
            .iter()
            .zip(&values)
            .enumerate()
            .map(|(i, (&date, &v))| SymbolSlot {
                index: i + 1,
                date,
                weekday: Some(date.weekday()),
                letter: scaling.letter(scheme, v),
            })
            .collect()
    } else {
        partition_windows(&dates, granularity, mode)
            .into_iter()
            .filter(|w| w.complete)
            .map(|w| SymbolSlot {
                index: w.ordinal,
                date: dates[w.start],
                weekday: None,
                letter: scaling.window_letter(scheme, &values[w.range()]),
            })
            .collect()
    };
    Ok(SymbolicSeries {
        attribute: series.attribute().to_string(),
        granularity,
        symbols,
        scheme: scheme.clone(),
        raw_band_edges: scaling.band_edges(scheme),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::sax_labels;
    use proptest::prelude::*;

    fn d0() -> NaiveDate {
        NaiveDate::from_ymd_opt(2021, 3, 1).unwrap()
    }

    #[test]
    fn paa_examples() {
        assert_eq!(paa(&[1.0, 2.0, 3.0, 4.0], 2, false), vec![1.5, 3.5]);
        assert_eq!(paa(&[1.0, 2.0, 3.0], 1, false), vec![1.0, 2.0, 3.0]);
        assert_eq!(paa(&[1.0, 2.0, 3.0], 2, false), vec![1.5]);
        assert_eq!(paa(&[1.0, 2.0, 3.0], 2, true), vec![1.5, 3.0]);
        let v: Vec<f64> = (0..174).map(f64::from).collect();
        assert_eq!(paa(&v, 7, false).len(), 174 / 7);
    }

    #[test]
    fn z_normalize_small() {
        let z = z_normalize_values(&[1.0, 2.0, 3.0]).unwrap();
        assert!((z[0] + 1.0).abs() < 1e-12 && z[1].abs() < 1e-12 && (z[2] - 1.0).abs() < 1e-12);
        assert_eq!(
            z_normalize_values(&[5.0, 5.0, 5.0]),
            Err(DiscretizeError::DegenerateSeries)
        );
        assert_eq!(
            z_normalize_values(&[5.0]),
            Err(DiscretizeError::DegenerateSeries)
        );
    }

    #[test]
    fn symmetric_breakpoints() {
        assert_eq!(gaussian_breakpoints(2).unwrap(), vec![0.0]);
        let b = gaussian_breakpoints(4).unwrap();
        assert_eq!(b[1], 0.0);
        assert!((b[0] + b[2]).abs() < 1e-12);
        assert!(gaussian_breakpoints(1).is_err());
        assert!(gaussian_breakpoints(27).is_err());
    }

    #[test]
    fn breakpoint_goes_to_upper_bin() {
        let s = BinningScheme::sax(5, sax_labels(5)).unwrap();
        let b = s.breakpoints()[1];
        assert_eq!(s.letter_for(b), Letter(2));
        assert_eq!(s.letter_for(b - 1e-9), Letter(1));
        assert_eq!(s.letter_for(-10.0), Letter(0));
        assert_eq!(s.letter_for(10.0), Letter(4));
    }

    #[test]
    fn range_bins_round_trip() {
        let bins = vec![
            RangeBin {
                upper_bound: Some(10.0),
                label: "low".into(),
            },
            RangeBin {
                upper_bound: None,
                label: "high".into(),
            },
        ];
        let s = BinningScheme::from_range_bins(&bins).unwrap();
        assert_eq!(s.to_range_bins(), bins);
        let mut bad = bins.clone();
        bad[1].upper_bound = Some(20.0);
        assert!(BinningScheme::from_range_bins(&bad).is_err());
    }

    #[test]
    fn window_partition_logged_days() {
        let dates: Vec<_> = d0().iter_days().take(174).collect();
        let w = partition_windows(&dates, Granularity::week(), WindowMode::LoggedDays);
        assert_eq!(w.len(), 25);
        assert_eq!(w.iter().filter(|w| w.complete).count(), 24);
        assert_eq!(w[23].ordinal, 24);
        assert!(!w[24].complete);
        let full = partition_windows(&dates, Granularity::full_range(), WindowMode::LoggedDays);
        assert_eq!(full.len(), 1);
        assert_eq!(full[0].len(), 174);
    }

    #[test]
    fn window_partition_calendar() {
        // 2021-03-01 is a Monday
        let dates: Vec<_> = d0().iter_days().take(17).collect();
        let w = partition_windows(&dates, Granularity::week(), WindowMode::Calendar);
        assert_eq!(w.len(), 3);
        assert!(w[0].complete && w[1].complete && !w[2].complete);
        let mut gappy = dates.clone();
        gappy.remove(3);
        let w = partition_windows(&gappy, Granularity::week(), WindowMode::Calendar);
        assert!(!w[0].complete && w[1].complete);
        let month: Vec<_> = d0().iter_days().take(40).collect();
        let w = partition_windows(&month, Granularity::month(), WindowMode::Calendar);
        assert_eq!(w.len(), 2);
        assert!(w[0].complete && !w[1].complete);
    }

    #[test]
    fn symbolize_weekly_uses_complete_windows_only() {
        let values: Vec<f64> = (0..20).map(|i| (i as f64 * 0.7).sin()).collect();
        let ts = TimeSeries::from_values("x", d0(), &values).unwrap();
        let s = BinningScheme::sax(5, sax_labels(5)).unwrap();
        let weekly = symbolize(&ts, Granularity::week(), &s, WindowMode::LoggedDays).unwrap();
        assert_eq!(weekly.symbols.len(), 2);
        let daily = symbolize(&ts, Granularity::day(), &s, WindowMode::LoggedDays).unwrap();
        assert_eq!(daily.symbols.len(), 20);
        assert!(weekly.raw_band_edges.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn raw_mode_skips_normalization() {
        let (scheme, _) = crate::model::heart_rate_vocabulary();
        let ts = TimeSeries::from_values("hr", d0(), &[72.0; 7]).unwrap();
        let daily = symbolize(&ts, Granularity::day(), &scheme, WindowMode::LoggedDays).unwrap();
        assert!(daily.letters().iter().all(|&l| l == Letter(2)));
        assert_eq!(daily.raw_band_edges, vec![50.0, 60.0, 110.0, 120.0]);
    }

    proptest! {
        #[test]
        fn larger_values_never_get_smaller_letters(values in prop::collection::vec(-1e3f64..1e3, 2..60)) {
            let s = BinningScheme::sax(5, sax_labels(5)).unwrap();
            if let Ok(sc) = Scaling::for_series(&values, &s) {
                for a in &values {
                    for b in &values {
                        if a < b {
                            prop_assert!(sc.letter(&s, *a) <= sc.letter(&s, *b));
                        }
                    }
                }
            }
        }

        #[test]
        fn normalization_is_idempotent(values in prop::collection::vec(-1e4f64..1e4, 3..80)) {
            if let Ok(z) = z_normalize_values(&values) {
                let zz = z_normalize_values(&z).unwrap();
                for (a, b) in z.iter().zip(&zz) {
                    prop_assert!((a - b).abs() < 1e-9);
                }
            }
        }
    }
}
