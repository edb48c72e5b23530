#![allow(dead_code)]

use chrono::NaiveDate;
use temposum_core::discretize::BinningScheme;
use temposum_core::frame::Frame;
use temposum_core::model::{default_health_vocabulary, sax_labels};
use temposum_core::protoforms::{GenContext, TemplateRegistry};
use temposum_core::{Granularity, RunConfig, TimeSeries, Vocabulary, WindowMode};

/// A Monday.
pub fn start() -> NaiveDate {
    NaiveDate::from_ymd_opt(2024, 1, 1).unwrap()
}

/// Values 1..=5 map straight to letters a..e.
pub fn direct_scheme() -> BinningScheme {
    BinningScheme::raw_ranges(vec![1.5, 2.5, 3.5, 4.5], sax_labels(5)).unwrap()
}

pub fn series(name: &str, values: &[f64]) -> TimeSeries {
    TimeSeries::from_values(name, start(), values).unwrap()
}

pub fn frame(columns: &[(&str, &[f64])]) -> Frame {
    frame_with(columns, Granularity::week())
}

pub fn frame_with(columns: &[(&str, &[f64])], granularity: Granularity) -> Frame {
    let series: Vec<TimeSeries> = columns.iter().map(|(n, v)| series(n, v)).collect();
    let refs: Vec<&TimeSeries> = series.iter().collect();
    let vocab = default_health_vocabulary();
    let schemes = vec![direct_scheme(); refs.len()];
    let phrases: Vec<String> = columns.iter().map(|(n, _)| vocab.attribute_phrase(n)).collect();
    Frame::build(&refs, &schemes, &phrases, granularity, WindowMode::LoggedDays).unwrap()
}

pub struct Env {
    pub config: RunConfig,
    pub vocab: Vocabulary,
    pub templates: TemplateRegistry,
}

impl Env {
    pub fn new() -> Self {
        Self {
            config: RunConfig::default(),
            vocab: default_health_vocabulary(),
            templates: TemplateRegistry::default(),
        }
    }

    pub fn ctx(&self) -> GenContext<'_> {
        GenContext::new(&self.config, &self.vocab, &self.templates)
    }
}

/// Zadeh S-function with squared terms, written out independently.
pub fn s_curve(r: f64, a: f64, b: f64) -> f64 {
    let m = (a + b) / 2.0;
    if r <= a {
        0.0
    } else if r <= m {
        2.0 * ((r - a) / (b - a)) * ((r - a) / (b - a))
    } else if r < b {
        1.0 - 2.0 * ((b - r) / (b - a)) * ((b - r) / (b - a))
    } else {
        1.0
    }
}

pub fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
