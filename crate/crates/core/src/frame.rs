//! Date-aligned, discretized view of one or more attributes for one user.

use std::ops::Range;

use chrono::{Datelike, NaiveDate, Weekday};
use thiserror::Error;

use crate::discretize::{partition_windows, BinningScheme, Scaling, WindowSpan};
use crate::model::{Granularity, Letter, TimeSeries, WindowMode};

#[derive(Debug, Error, PartialEq)]
pub enum FrameError {
    #[error("no attributes given")]
    NoAttributes,
    #[error("attributes share no logged dates")]
    NoCommonDates,
    #[error("{0} schemes for {1} attributes")]
    SchemeCount(usize, usize),
}

/// One attribute restricted to the frame's dates.
#[derive(Debug, Clone, PartialEq)]
pub struct Track {
    pub attribute: String,
    pub phrase: String,
    pub scheme: BinningScheme,
    pub scaling: Scaling,
    /// Raw-unit breakpoints for drawing bands.
    pub band_edges: Vec<f64>,
    pub raw: Vec<f64>,
    pub letters: Vec<Letter>,
}

impl Track {
    pub fn label(&self, letter: Letter) -> &str {
        self.scheme.label(letter)
    }

    pub fn alphabet_size(&self) -> usize {
        self.scheme.alphabet_size()
    }

    /// Letter of the PAA mean over `range`.
    pub fn window_letter(&self, range: Range<usize>) -> Letter {
        self.scaling.window_letter(&self.scheme, &self.raw[range])
    }

    pub fn window_mean(&self, range: Range<usize>) -> f64 {
        let r = &self.raw[range];
        r.iter().sum::<f64>() / r.len() as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Frame {
    pub dates: Vec<NaiveDate>,
    pub tracks: Vec<Track>,
    pub granularity: Granularity,
    /// All windows, including a trailing incomplete one.
    pub windows: Vec<WindowSpan>,
}

impl Frame {
    /// Aligns the series on their common dates. Each attribute keeps the
    /// normalization statistics of its full series.
    pub fn build(
        series: &[&TimeSeries],
        schemes: &[BinningScheme],
        phrases: &[String],
        granularity: Granularity,
        mode: WindowMode,
    ) -> Result<Self, FrameError> {
        if series.is_empty() {
            return Err(FrameError::NoAttributes);
        }
        if schemes.len() != series.len() || phrases.len() != series.len() {
            return Err(FrameError::SchemeCount(schemes.len(), series.len()));
        }
        let mut dates = series[0].dates();
        for s in &series[1..] {
            let other = s.dates();
            dates.retain(|d| other.binary_search(d).is_ok());
        }
        if dates.is_empty() {
            return Err(FrameError::NoCommonDates);
        }
        let tracks = series
            .iter()
            .zip(schemes)
            .zip(phrases)
            .map(|((s, scheme), phrase)| {
                let all = s.values();
                let scaling = Scaling::for_series_or_constant(&all, scheme);
                let s_dates = s.dates();
                let raw: Vec<f64> = dates
                    .iter()
                    .map(|d| all[s_dates.binary_search(d).expect("date is common")])
                    .collect();
                let letters = raw.iter().map(|&v| scaling.letter(scheme, v)).collect();
                Track {
                    attribute: s.attribute().to_string(),
                    phrase: phrase.clone(),
                    scheme: scheme.clone(),
                    band_edges: scaling.band_edges(scheme),
                    scaling,
                    raw,
                    letters,
                }
            })
            .collect();
        let windows = partition_windows(&dates, granularity, mode);
        Ok(Self {
            dates,
            tracks,
            granularity,
            windows,
        })
    }

    pub fn len(&self) -> usize {
        self.dates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dates.is_empty()
    }

    pub fn is_multivariate(&self) -> bool {
        self.tracks.len() > 1
    }

    pub fn attributes(&self) -> Vec<String> {
        self.tracks.iter().map(|t| t.attribute.clone()).collect()
    }

    pub fn complete_windows(&self) -> impl Iterator<Item = &WindowSpan> {
        self.windows.iter().filter(|w| w.complete)
    }

    pub fn last_full_window(&self) -> Option<&WindowSpan> {
        self.windows.iter().rev().find(|w| w.complete)
    }

    pub fn complete_window(&self, ordinal: usize) -> Option<&WindowSpan> {
        self.windows
            .iter()
            .find(|w| w.ordinal == ordinal && w.complete)
    }

    /// Window-level letters, one per attribute.
    pub fn window_letters(&self, w: &WindowSpan) -> Vec<Letter> {
        self.tracks.iter().map(|t| t.window_letter(w.range())).collect()
    }

    /// Day-level letters, one per attribute.
    pub fn day_letters(&self, i: usize) -> Vec<Letter> {
        self.tracks.iter().map(|t| t.letters[i]).collect()
    }

    pub fn weekday(&self, i: usize) -> Weekday {
        self.dates[i].weekday()
    }

    /// Maximal runs of consecutive calendar days.
    pub fn segments(&self) -> Vec<Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for i in 1..=self.dates.len() {
            if i == self.dates.len() || (self.dates[i] - self.dates[i - 1]).num_days() != 1 {
                out.push(start..i);
                start = i;
            }
        }
        out
    }

    /// Index pairs (i, i+1) of consecutive calendar days.
    pub fn consecutive_pairs(&self) -> Vec<(usize, usize)> {
        (1..self.dates.len())
            .filter(|&i| (self.dates[i] - self.dates[i - 1]).num_days() == 1)
            .map(|i| (i - 1, i))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{sax_labels, Observation};

    fn series(name: &str, days: &[i64], values: &[f64]) -> TimeSeries {
        let d0 = NaiveDate::from_ymd_opt(2022, 1, 3).unwrap();
        let pts = days
            .iter()
            .zip(values)
            .map(|(&d, &v)| Observation {
                date: d0 + chrono::Days::new(d as u64),
                value: v,
            })
            .collect();
        TimeSeries::new(name, "", pts).unwrap()
    }

    #[test]
    fn aligns_on_common_dates() {
        let a = series("a", &[0, 1, 2, 3, 5], &[1.0, 2.0, 3.0, 4.0, 5.0]);
        let b = series("b", &[1, 2, 3, 4, 5], &[1.0, 2.0, 3.0, 4.0, 5.0]);
        let s = BinningScheme::sax(5, sax_labels(5)).unwrap();
        let f = Frame::build(
            &[&a, &b],
            &[s.clone(), s],
            &["a".into(), "b".into()],
            Granularity::week(),
            WindowMode::LoggedDays,
        )
        .unwrap();
        assert_eq!(f.len(), 4);
        assert_eq!(f.tracks[0].raw, vec![2.0, 3.0, 4.0, 5.0]);
        assert_eq!(f.segments(), vec![0..3, 3..4]);
        assert_eq!(f.consecutive_pairs(), vec![(0, 1), (1, 2)]);
        assert!(f.last_full_window().is_none());
    }

    #[test]
    fn constant_series_gets_middle_letter() {
        let a = series("a", &[0, 1, 2], &[4.0, 4.0, 4.0]);
        let s = BinningScheme::sax(5, sax_labels(5)).unwrap();
        let f = Frame::build(
            &[&a],
            &[s],
            &["a".into()],
            Granularity::week(),
            WindowMode::LoggedDays,
        )
        .unwrap();
        assert!(f.tracks[0].letters.iter().all(|&l| l == Letter(2)));
    }
}
