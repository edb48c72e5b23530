//! Shared domain types: time series, granularities, goals, vocabularies and
//! run configuration.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate, Weekday};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::discretize::{BinningScheme, RangeBin};
use crate::fuzzy::Quantifier;

#[derive(Debug, Error, PartialEq)]
pub enum ModelError {
    #[error("time series `{0}` has no observations")]
    EmptySeries(String),
    #[error("time series `{attribute}` has a non-finite value on {date}")]
    NonFinite { attribute: String, date: NaiveDate },
    #[error("time series `{attribute}` dates are not strictly increasing at {date}")]
    UnorderedDates { attribute: String, date: NaiveDate },
    #[error("invalid granularity: {0}")]
    InvalidGranularity(String),
    #[error("invalid goal `{0}`")]
    InvalidGoal(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid vocabulary: {0}")]
    InvalidVocabulary(String),
}

/// One dated observation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observation {
    pub date: NaiveDate,
    pub value: f64,
}

/// A single attribute's observations for one user, ordered by date.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    attribute: String,
    unit: String,
    points: Vec<Observation>,
}

impl TimeSeries {
    pub fn new(
        attribute: impl Into<String>,
        unit: impl Into<String>,
        points: Vec<Observation>,
    ) -> Result<Self, ModelError> {
        let attribute = attribute.into();
        if points.is_empty() {
            return Err(ModelError::EmptySeries(attribute));
        }
        for (i, p) in points.iter().enumerate() {
            if !p.value.is_finite() {
                return Err(ModelError::NonFinite {
                    attribute,
                    date: p.date,
                });
            }
            if i > 0 && points[i - 1].date >= p.date {
                return Err(ModelError::UnorderedDates {
                    attribute,
                    date: p.date,
                });
            }
        }
        Ok(Self {
            attribute,
            unit: unit.into(),
            points,
        })
    }

    /// Builds a series from consecutive calendar days starting at `start`.
    pub fn from_values(
        attribute: impl Into<String>,
        start: NaiveDate,
        values: &[f64],
    ) -> Result<Self, ModelError> {
        let points = values
            .iter()
            .zip(start.iter_days())
            .map(|(&value, date)| Observation { date, value })
            .collect();
        Self::new(attribute, "", points)
    }

    pub fn attribute(&self) -> &str {
        &self.attribute
    }

    pub fn unit(&self) -> &str {
        &self.unit
    }

    pub fn points(&self) -> &[Observation] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.points.iter().map(|p| p.value).collect()
    }

    pub fn dates(&self) -> Vec<NaiveDate> {
        self.points.iter().map(|p| p.date).collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GranularityKind {
    Day,
    Week,
    Month,
    FullRange,
}

/// Time-window granularity. `tw_len` is the number of sub-windows (days)
/// per window; the full-range granularity has a single window and no length.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Granularity {
    kind: GranularityKind,
    tw_len: Option<usize>,
}

impl Granularity {
    pub fn new(kind: GranularityKind, tw_len: Option<usize>) -> Result<Self, ModelError> {
        match (kind, tw_len) {
            (GranularityKind::FullRange, None) => Ok(Self { kind, tw_len }),
            (GranularityKind::FullRange, Some(_)) => Err(ModelError::InvalidGranularity(
                "full-range granularity has no window length".into(),
            )),
            (_, Some(0)) | (_, None) => Err(ModelError::InvalidGranularity(
                "window length must be at least 1".into(),
            )),
            (_, Some(_)) => Ok(Self { kind, tw_len }),
        }
    }

    pub fn day() -> Self {
        Self {
            kind: GranularityKind::Day,
            tw_len: Some(1),
        }
    }

    pub fn week() -> Self {
        Self {
            kind: GranularityKind::Week,
            tw_len: Some(7),
        }
    }

    pub fn month() -> Self {
        Self {
            kind: GranularityKind::Month,
            tw_len: Some(30),
        }
    }

    pub fn full_range() -> Self {
        Self {
            kind: GranularityKind::FullRange,
            tw_len: None,
        }
    }

    pub fn kind(&self) -> GranularityKind {
        self.kind
    }

    pub fn tw_len(&self) -> Option<usize> {
        self.tw_len
    }

    pub fn is_windowed(&self) -> bool {
        self.kind != GranularityKind::FullRange
    }

    /// Singular noun used in sentences ("week").
    pub fn window_noun(&self) -> &'static str {
        match self.kind {
            GranularityKind::Day => "day",
            GranularityKind::Week => "week",
            GranularityKind::Month => "month",
            GranularityKind::FullRange => "period",
        }
    }

    pub fn window_plural(&self) -> &'static str {
        match self.kind {
            GranularityKind::Day => "days",
            GranularityKind::Week => "weeks",
            GranularityKind::Month => "months",
            GranularityKind::FullRange => "periods",
        }
    }
}

impl Default for Granularity {
    fn default() -> Self {
        Self::week()
    }
}

/// How windows are cut out of the logged days.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WindowMode {
    /// `tw_len` consecutive logged days form a window, regardless of gaps.
    #[default]
    LoggedDays,
    /// Calendar weeks (ISO, Monday first) or calendar months; a window is
    /// complete only when every calendar day in it was logged.
    Calendar,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Comparator {
    AtMost { value: f64 },
    AtLeast { value: f64 },
    WithinRange { lower: f64, upper: f64 },
}

impl Comparator {
    pub fn holds(&self, v: f64) -> bool {
        match *self {
            Comparator::AtMost { value } => v <= value,
            Comparator::AtLeast { value } => v >= value,
            Comparator::WithinRange { lower, upper } => lower <= v && v <= upper,
        }
    }

    /// Thresholds drawn as goal lines.
    pub fn thresholds(&self) -> Vec<f64> {
        match *self {
            Comparator::AtMost { value } | Comparator::AtLeast { value } => vec![value],
            Comparator::WithinRange { lower, upper } => vec![lower, upper],
        }
    }
}

/// A per-attribute goal such as "keep calories at most 2000 (low)".
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Goal {
    pub attribute: String,
    pub comparator: Comparator,
    pub label: String,
}

impl Goal {
    pub fn new(
        attribute: impl Into<String>,
        comparator: Comparator,
        label: impl Into<String>,
    ) -> Result<Self, ModelError> {
        let attribute = attribute.into();
        if let Comparator::WithinRange { lower, upper } = comparator {
            if !(lower < upper) {
                return Err(ModelError::InvalidGoal(format!(
                    "{attribute}: range lower bound must be below upper bound"
                )));
            }
        }
        Ok(Self {
            attribute,
            comparator,
            label: label.into(),
        })
    }

    pub fn reached(&self, value: f64) -> bool {
        self.comparator.holds(value)
    }
}

/// Parses `attr<=value:label`, `attr>=value:label` or `attr=lo..hi:label`.
impl FromStr for Goal {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || ModelError::InvalidGoal(s.to_string());
        let (spec, label) = s.rsplit_once(':').ok_or_else(bad)?;
        let label = label.trim();
        if label.is_empty() {
            return Err(bad());
        }
        let num = |t: &str| t.trim().parse::<f64>().map_err(|_| bad());
        let (attribute, comparator) = if let Some((a, v)) = spec.split_once("<=") {
            (a, Comparator::AtMost { value: num(v)? })
        } else if let Some((a, v)) = spec.split_once(">=") {
            (a, Comparator::AtLeast { value: num(v)? })
        } else if let Some((a, range)) = spec.split_once('=') {
            let (lo, hi) = range.split_once("..").ok_or_else(bad)?;
            (
                a,
                Comparator::WithinRange {
                    lower: num(lo)?,
                    upper: num(hi)?,
                },
            )
        } else {
            return Err(bad());
        };
        let attribute = attribute.trim();
        if attribute.is_empty() {
            return Err(bad());
        }
        Goal::new(attribute, comparator, label)
    }
}

/// Target band for one attribute in a diet guideline. Either bound may be open.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TargetRange {
    #[serde(default)]
    pub min: Option<f64>,
    #[serde(default)]
    pub max: Option<f64>,
}

/// A named guideline ("2000-calorie diet") with per-attribute target bands.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Guideline {
    pub name: String,
    pub targets: BTreeMap<String, TargetRange>,
}

impl Guideline {
    /// The guideline used in the running calorie example: at most 2000 kcal,
    /// 225 to 325 g of carbohydrates.
    pub fn two_thousand_calorie_diet() -> Self {
        let mut targets = BTreeMap::new();
        targets.insert(
            "Calories".to_string(),
            TargetRange {
                min: None,
                max: Some(2000.0),
            },
        );
        targets.insert(
            "Carbohydrates".to_string(),
            TargetRange {
                min: Some(225.0),
                max: Some(325.0),
            },
        );
        Self {
            name: "2000-calorie diet".into(),
            targets,
        }
    }
}

/// Keys of the per-protoform summarizer sets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SummarizerSet {
    StandardEvaluation,
    GoalEvaluation,
    GoalAssistance,
    DayBased,
    StandardTrend,
    IfThen,
    Comparison,
    GoalComparison,
    ClusterBased,
}

impl SummarizerSet {
    pub const ALL: [SummarizerSet; 9] = [
        SummarizerSet::StandardEvaluation,
        SummarizerSet::GoalEvaluation,
        SummarizerSet::GoalAssistance,
        SummarizerSet::DayBased,
        SummarizerSet::StandardTrend,
        SummarizerSet::IfThen,
        SummarizerSet::Comparison,
        SummarizerSet::GoalComparison,
        SummarizerSet::ClusterBased,
    ];
}

/// Quantifiers, summarizer label sets and display phrases.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Vocabulary {
    pub quantifiers: Vec<Quantifier>,
    pub summarizer_sets: BTreeMap<SummarizerSet, Vec<String>>,
    /// Column name to the phrase used in sentences ("Calories" -> "calorie intake").
    #[serde(default)]
    pub attribute_phrases: BTreeMap<String, String>,
    /// Per-attribute raw-value binning that replaces SAX for that attribute.
    #[serde(default)]
    pub raw_ranges: BTreeMap<String, Vec<RangeBin>>,
}

const STANDARD_LABELS: [&str; 5] = ["very low", "low", "moderate", "high", "very high"];

fn labels(xs: &[&str]) -> Vec<String> {
    xs.iter().map(|s| s.to_string()).collect()
}

/// Quantifiers of the health vocabulary and the label sets for each protoform type.
pub fn default_health_vocabulary() -> Vocabulary {
    use SummarizerSet::*;
    let mut sets = BTreeMap::new();
    sets.insert(StandardEvaluation, labels(&STANDARD_LABELS));
    sets.insert(GoalEvaluation, labels(&["reached", "did not reach"]));
    sets.insert(GoalAssistance, labels(&["increase", "decrease"]));
    sets.insert(DayBased, labels(&STANDARD_LABELS));
    sets.insert(
        StandardTrend,
        labels(&["increased", "decreased", "stayed the same"]),
    );
    sets.insert(IfThen, labels(&STANDARD_LABELS));
    sets.insert(Comparison, labels(&["higher", "lower", "about the same"]));
    sets.insert(
        GoalComparison,
        labels(&["better", "not do as well", "about the same"]),
    );
    sets.insert(ClusterBased, labels(&["rose", "dropped", "stayed the same"]));

    let mut phrases = BTreeMap::new();
    phrases.insert("Calories".to_string(), "calorie intake".to_string());
    phrases.insert("Carbohydrates".to_string(), "carbohydrate intake".to_string());
    phrases.insert("Heart Rate".to_string(), "heart rate".to_string());
    phrases.insert("Steps".to_string(), "step count".to_string());

    Vocabulary {
        quantifiers: crate::fuzzy::default_quantifiers(),
        summarizer_sets: sets,
        attribute_phrases: phrases,
        raw_ranges: BTreeMap::from([("Heart Rate".to_string(), heart_rate_range_bins())]),
    }
}

/// Raw-value heart-rate bins: below 50 abnormally low, 50 to 60 low, 60 to
/// 110 within range, 110 to 120 high, 120 and up abnormally high.
pub fn heart_rate_vocabulary() -> (BinningScheme, Vec<String>) {
    let labels = labels(&[
        "abnormally low",
        "low",
        "within range",
        "high",
        "abnormally high",
    ]);
    let scheme = BinningScheme::raw_ranges(vec![50.0, 60.0, 110.0, 120.0], labels.clone())
        .expect("static heart-rate bins are valid");
    (scheme, labels)
}

/// Heart-rate bins as a vocabulary `raw_ranges` entry.
pub fn heart_rate_range_bins() -> Vec<RangeBin> {
    let (scheme, _) = heart_rate_vocabulary();
    scheme.to_range_bins()
}

/// SAX labels for an alphabet of size `n`.
pub fn sax_labels(n: usize) -> Vec<String> {
    match n {
        2 => labels(&["low", "high"]),
        3 => labels(&["low", "moderate", "high"]),
        4 => labels(&["very low", "low", "high", "very high"]),
        5 => labels(&STANDARD_LABELS),
        6 => labels(&[
            "very low",
            "low",
            "somewhat low",
            "somewhat high",
            "high",
            "very high",
        ]),
        7 => labels(&[
            "extremely low",
            "very low",
            "low",
            "moderate",
            "high",
            "very high",
            "extremely high",
        ]),
        _ => (1..=n).map(|i| format!("level {i} of {n}")).collect(),
    }
}

impl Vocabulary {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.quantifiers.is_empty() {
            return Err(ModelError::InvalidVocabulary("no quantifiers".into()));
        }
        for q in &self.quantifiers {
            q.validate()
                .map_err(|e| ModelError::InvalidVocabulary(e.to_string()))?;
        }
        for key in SummarizerSet::ALL {
            match self.summarizer_sets.get(&key) {
                Some(set) if !set.is_empty() => {
                    // these sets are positional: the generators pick labels by index
                    let fixed = match key {
                        SummarizerSet::GoalEvaluation | SummarizerSet::GoalAssistance => Some(2),
                        SummarizerSet::StandardTrend
                        | SummarizerSet::Comparison
                        | SummarizerSet::GoalComparison
                        | SummarizerSet::ClusterBased => Some(3),
                        _ => None,
                    };
                    if let Some(n) = fixed {
                        if set.len() != n {
                            return Err(ModelError::InvalidVocabulary(format!(
                                "summarizer set {key:?} must have {n} labels"
                            )));
                        }
                    }
                }
                _ => {
                    return Err(ModelError::InvalidVocabulary(format!(
                        "summarizer set {key:?} missing or empty"
                    )))
                }
            }
        }
        for (attr, bins) in &self.raw_ranges {
            BinningScheme::from_range_bins(bins).map_err(|e| {
                ModelError::InvalidVocabulary(format!("raw ranges for {attr}: {e}"))
            })?;
        }
        Ok(())
    }

    pub fn set(&self, key: SummarizerSet) -> &[String] {
        self.summarizer_sets
            .get(&key)
            .map(Vec::as_slice)
            .unwrap_or(&[])
    }

    /// Sentence phrase for a column; falls back to the lower-cased name.
    pub fn attribute_phrase(&self, column: &str) -> String {
        self.attribute_phrases
            .get(column)
            .cloned()
            .unwrap_or_else(|| column.to_lowercase())
    }

    /// Standard-evaluation labels for an alphabet of `n` letters.
    pub fn standard_labels(&self, n: usize) -> Vec<String> {
        let set = self.set(SummarizerSet::StandardEvaluation);
        if set.len() == n {
            set.to_vec()
        } else {
            sax_labels(n)
        }
    }

    pub fn quantifier(&self, name: &str) -> Option<&Quantifier> {
        self.quantifiers.iter().find(|q| q.name == name)
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let v: Vocabulary = serde_json::from_str(text)
            .map_err(|e| ModelError::InvalidVocabulary(e.to_string()))?;
        v.validate()?;
        Ok(v)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("vocabulary serializes")
    }
}

impl Default for Vocabulary {
    fn default() -> Self {
        default_health_vocabulary()
    }
}

/// Run parameters. Defaults: alphabet 5, weekly windows of 7 days, 20%
/// minimum support, 80% minimum confidence, Squeezer sample fraction 0.2.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub alphabet_size: usize,
    pub granularity: Granularity,
    pub window_mode: WindowMode,
    pub min_support: f64,
    pub min_confidence: f64,
    pub squeezer_sample_fraction: f64,
    pub rng_seed: u64,
    pub goals: Vec<Goal>,
    pub diet_guideline: Option<Guideline>,
    /// Tolerance under which consecutive values count as "stayed the same".
    pub trend_epsilon: f64,
    /// Day-based summaries below this truth value are suppressed.
    pub day_emission_threshold: f64,
    /// Multivariate if-then prefixes constrain a single attribute (default) or all.
    pub prefix_all_attributes: bool,
    /// Use the S-function exactly as printed instead of the squared form.
    pub literal_coverage: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            alphabet_size: 5,
            granularity: Granularity::week(),
            window_mode: WindowMode::LoggedDays,
            min_support: 0.20,
            min_confidence: 0.80,
            squeezer_sample_fraction: 0.20,
            rng_seed: 42,
            goals: Vec::new(),
            diet_guideline: None,
            trend_epsilon: 0.0,
            day_emission_threshold: 0.7,
            prefix_all_attributes: false,
            literal_coverage: false,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        let bad = |m: &str| Err(ModelError::InvalidConfig(m.to_string()));
        if !(2..=26).contains(&self.alphabet_size) {
            return bad("alphabet size must be between 2 and 26");
        }
        if !(self.min_support > 0.0 && self.min_support <= 1.0) {
            return bad("minimum support must be in (0, 1]");
        }
        if !(self.min_confidence > 0.0 && self.min_confidence <= 1.0) {
            return bad("minimum confidence must be in (0, 1]");
        }
        if !(self.squeezer_sample_fraction > 0.0 && self.squeezer_sample_fraction <= 1.0) {
            return bad("sample fraction must be in (0, 1]");
        }
        if !(self.trend_epsilon >= 0.0) {
            return bad("trend tolerance must be non-negative");
        }
        Ok(())
    }

    pub fn goal_for(&self, attribute: &str) -> Option<&Goal> {
        self.goals.iter().find(|g| g.attribute == attribute)
    }
}

/// English weekday name ("Sunday").
pub fn weekday_name(day: Weekday) -> &'static str {
    match day {
        Weekday::Mon => "Monday",
        Weekday::Tue => "Tuesday",
        Weekday::Wed => "Wednesday",
        Weekday::Thu => "Thursday",
        Weekday::Fri => "Friday",
        Weekday::Sat => "Saturday",
        Weekday::Sun => "Sunday",
    }
}

pub fn weekday_of(date: NaiveDate) -> Weekday {
    date.weekday()
}

/// A zero-based letter index within a binning scheme's alphabet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Letter(pub u8);

impl Letter {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn as_char(self) -> char {
        (b'a' + self.0) as char
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.as_char())
    }
}
