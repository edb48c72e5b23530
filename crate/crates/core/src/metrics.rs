//! Summary quality measures T1 to T6.

use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

pub const COVERAGE_R1: f64 = 0.02;
pub const COVERAGE_R2: f64 = 0.15;

/// A measure value, or N/A for summary types it does not apply to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Metric {
    Value(f64),
    NotApplicable,
}

impl Metric {
    pub fn value(self) -> Option<f64> {
        match self {
            Metric::Value(v) => Some(v),
            Metric::NotApplicable => None,
        }
    }

    pub fn is_na(self) -> bool {
        self == Metric::NotApplicable
    }

    /// Two-decimal display form, or "N/A".
    pub fn display(self) -> String {
        match self {
            Metric::Value(v) => {
                let s = format!("{v:.2}");
                let s = s.trim_end_matches('0').trim_end_matches('.');
                if s == "-0" {
                    "0".to_string()
                } else {
                    s.to_string()
                }
            }
            Metric::NotApplicable => "N/A".to_string(),
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.display())
    }
}

impl Serialize for Metric {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Metric::Value(v) => s.serialize_f64(*v),
            Metric::NotApplicable => s.serialize_str("N/A"),
        }
    }
}

impl<'de> Deserialize<'de> for Metric {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Metric;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a number or \"N/A\"")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Metric, E> {
                Ok(Metric::Value(v))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Metric, E> {
                Ok(Metric::Value(v as f64))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Metric, E> {
                Ok(Metric::Value(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Metric, E> {
                if v == "N/A" {
                    Ok(Metric::NotApplicable)
                } else {
                    Err(E::invalid_value(de::Unexpected::Str(v), &self))
                }
            }
        }
        d.deserialize_any(V)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    #[serde(rename = "T1")]
    pub t1: Metric,
    #[serde(rename = "T2")]
    pub t2: Metric,
    #[serde(rename = "T3")]
    pub t3: Metric,
    #[serde(rename = "T4")]
    pub t4: Metric,
    #[serde(rename = "T5")]
    pub t5: Metric,
    #[serde(rename = "T6")]
    pub t6: Metric,
}

impl MetricSet {
    pub fn as_array(&self) -> [Metric; 6] {
        [self.t1, self.t2, self.t3, self.t4, self.t5, self.t6]
    }
}

/// Which measures apply to a summary type.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricPolicy {
    /// Quantified summaries: everything applies.
    Quantified,
    /// Mined rules: appropriateness is not defined.
    Rule,
    /// Unquantified statements: no truth or imprecision, full covering.
    Unquantified,
    /// Advice: only length quality.
    LengthOnly,
}

/// Raw inputs to the measures, gathered by the summary generators.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MetricInputs {
    /// Truth value of the winning quantifier.
    pub truth: f64,
    /// Ratios of every candidate summarizer (combination).
    pub r_values: Vec<f64>,
    /// Ratio of the winning summarizer over the query subset.
    pub covering: f64,
    /// Per-attribute ratios; empty or a single entry for univariate summaries.
    pub attribute_ratios: Vec<f64>,
    /// Ratio fed to the coverage S-function.
    pub coverage_ratio: f64,
    /// Number of summarizer tokens in the sentence.
    pub summarizer_count: usize,
}

pub fn degree_of_truth(mu: f64) -> f64 {
    mu
}

/// 1 minus the geometric mean of the ratios; a zero ratio gives 1.
pub fn degree_of_imprecision(r_values: &[f64]) -> f64 {
    if r_values.is_empty() || r_values.iter().any(|&r| r <= 0.0) {
        return 1.0;
    }
    let m = r_values.len() as f64;
    let log_mean = r_values.iter().map(|r| r.ln()).sum::<f64>() / m;
    (1.0 - log_mean.exp()).clamp(0.0, 1.0)
}

pub fn degree_of_covering(r: f64) -> f64 {
    r
}

/// |prod r_k - T3|; 0 for a single attribute.
pub fn degree_of_appropriateness(attribute_ratios: &[f64], covering: f64) -> f64 {
    if attribute_ratios.len() <= 1 {
        return 0.0;
    }
    let product: f64 = attribute_ratios.iter().product();
    (product - covering).abs()
}

/// S-shaped coverage function rising from 0 at r1 to 1 at r2.
pub fn degree_of_coverage(r: f64) -> f64 {
    s_function(r, COVERAGE_R1, COVERAGE_R2)
}

pub fn s_function(r: f64, r1: f64, r2: f64) -> f64 {
    let mid = (r1 + r2) / 2.0;
    let w = r2 - r1;
    if r <= r1 {
        0.0
    } else if r <= mid {
        2.0 * ((r - r1) / w).powi(2)
    } else if r < r2 {
        1.0 - 2.0 * ((r - r2) / w).powi(2)
    } else {
        1.0
    }
}

/// The coverage formula with unsquared numerators. It leaves [0, 1] inside
/// the transition; kept for comparison with older outputs.
pub fn degree_of_coverage_as_printed(r: f64) -> f64 {
    let (r1, r2) = (COVERAGE_R1, COVERAGE_R2);
    let mid = (r1 + r2) / 2.0;
    let w2 = (r2 - r1).powi(2);
    if r <= r1 {
        0.0
    } else if r <= mid {
        2.0 * (r - r1) / w2
    } else if r < r2 {
        1.0 - 2.0 * (r - r2) / w2
    } else {
        1.0
    }
}

/// 2 * 0.5^card.
pub fn length_quality(summarizer_count: usize) -> f64 {
    2.0 * 0.5f64.powi(summarizer_count as i32)
}

/// Builds the metric set. With `literal_coverage` the unsquared coverage
/// formula is used, clamped to [0, 1].
pub fn compute(policy: MetricPolicy, inputs: &MetricInputs, literal_coverage: bool) -> MetricSet {
    use Metric::*;
    let t6 = Value(length_quality(inputs.summarizer_count));
    let coverage = |r: f64| {
        if literal_coverage {
            degree_of_coverage_as_printed(r).clamp(0.0, 1.0)
        } else {
            degree_of_coverage(r)
        }
    };
    match policy {
        MetricPolicy::Quantified | MetricPolicy::Rule => MetricSet {
            t1: Value(degree_of_truth(inputs.truth)),
            t2: Value(degree_of_imprecision(&inputs.r_values)),
            t3: Value(degree_of_covering(inputs.covering)),
            t4: if policy == MetricPolicy::Rule {
                NotApplicable
            } else {
                Value(degree_of_appropriateness(
                    &inputs.attribute_ratios,
                    inputs.covering,
                ))
            },
            t5: Value(coverage(inputs.coverage_ratio)),
            t6,
        },
        MetricPolicy::Unquantified => MetricSet {
            t1: NotApplicable,
            t2: NotApplicable,
            t3: Value(1.0),
            t4: Value(0.0),
            t5: Value(1.0),
            t6,
        },
        MetricPolicy::LengthOnly => MetricSet {
            t1: NotApplicable,
            t2: NotApplicable,
            t3: NotApplicable,
            t4: NotApplicable,
            t5: NotApplicable,
            t6,
        },
    }
}
