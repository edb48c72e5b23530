//! Summary types, template rendering and the summary generators.

mod group;
mod individual;
mod templates;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use chrono::Weekday;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use group::{gen_group, GroupError};
pub use individual::{
    gen_cluster_pattern, gen_comparison, gen_day_based, gen_day_ifthen, gen_general_ifthen,
    gen_goal_assistance, gen_goal_evaluation, gen_ifthen, gen_qualifier, gen_standard_eval_stw,
    gen_standard_eval_tw, gen_standard_trend, generate_all, GenContext,
};
pub use templates::{join_clauses, TemplateEntry, TemplateError, TemplateRegistry};

use crate::metrics::{MetricPolicy, MetricSet};
use crate::model::SummarizerSet;

#[derive(Debug, Error, PartialEq)]
pub enum ProtoformError {
    #[error("no complete time window")]
    NoCompleteWindow,
    #[error("no goal defined for `{0}`")]
    MissingGoal(String),
    #[error("no diet guideline configured")]
    MissingGuideline,
    #[error("weekday occurs fewer than 2 times")]
    TooFewOccurrences,
    #[error("needs at least 2 attributes")]
    SingleAttribute,
    #[error("needs at least 2 consecutive logged days")]
    TooShort,
    #[error("window {0} is not complete")]
    IncompleteWindow(usize),
    #[error("qualifier matches no day")]
    EmptyQualifierSubset,
    #[error("target window has no similar window with a successor")]
    OrphanWindow,
    #[error(transparent)]
    Template(#[from] TemplateError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ProtoformType {
    StandardEvalTW,
    StandardEvalSTW,
    StandardEvalQualifier,
    GoalEvaluation,
    GoalAssistance,
    DayBasedPattern,
    GeneralIfThen,
    StandardTrend,
    IfThenPattern,
    DayIfThenPattern,
    Comparison,
    GoalComparison,
    ClusterBasedPattern,
    StandardPattern,
    GroupPopulationEval,
    GroupClusterPattern,
    GroupStandardPattern,
    GroupIfThen,
}

impl ProtoformType {
    pub const INDIVIDUAL: [ProtoformType; 14] = [
        ProtoformType::StandardEvalTW,
        ProtoformType::StandardEvalSTW,
        ProtoformType::StandardEvalQualifier,
        ProtoformType::GoalEvaluation,
        ProtoformType::GoalAssistance,
        ProtoformType::DayBasedPattern,
        ProtoformType::GeneralIfThen,
        ProtoformType::StandardTrend,
        ProtoformType::IfThenPattern,
        ProtoformType::DayIfThenPattern,
        ProtoformType::Comparison,
        ProtoformType::GoalComparison,
        ProtoformType::ClusterBasedPattern,
        ProtoformType::StandardPattern,
    ];

    pub const GROUP: [ProtoformType; 4] = [
        ProtoformType::GroupPopulationEval,
        ProtoformType::GroupClusterPattern,
        ProtoformType::GroupStandardPattern,
        ProtoformType::GroupIfThen,
    ];

    /// Types that need no time window.
    pub const WINDOW_FREE: [ProtoformType; 4] = [
        ProtoformType::StandardEvalSTW,
        ProtoformType::GoalEvaluation,
        ProtoformType::StandardTrend,
        ProtoformType::DayBasedPattern,
    ];

    pub fn name(self) -> &'static str {
        use ProtoformType::*;
        match self {
            StandardEvalTW => "StandardEvalTW",
            StandardEvalSTW => "StandardEvalSTW",
            StandardEvalQualifier => "StandardEvalQualifier",
            GoalEvaluation => "GoalEvaluation",
            GoalAssistance => "GoalAssistance",
            DayBasedPattern => "DayBasedPattern",
            GeneralIfThen => "GeneralIfThen",
            StandardTrend => "StandardTrend",
            IfThenPattern => "IfThenPattern",
            DayIfThenPattern => "DayIfThenPattern",
            Comparison => "Comparison",
            GoalComparison => "GoalComparison",
            ClusterBasedPattern => "ClusterBasedPattern",
            StandardPattern => "StandardPattern",
            GroupPopulationEval => "GroupPopulationEval",
            GroupClusterPattern => "GroupClusterPattern",
            GroupStandardPattern => "GroupStandardPattern",
            GroupIfThen => "GroupIfThen",
        }
    }

    /// Summarizer set the type draws its conclusions from.
    pub fn summarizer_set(self) -> SummarizerSet {
        use ProtoformType::*;
        match self {
            StandardEvalTW | StandardEvalSTW | StandardEvalQualifier | GroupPopulationEval => {
                SummarizerSet::StandardEvaluation
            }
            GoalEvaluation => SummarizerSet::GoalEvaluation,
            GoalAssistance => SummarizerSet::GoalAssistance,
            DayBasedPattern => SummarizerSet::DayBased,
            StandardTrend => SummarizerSet::StandardTrend,
            GeneralIfThen | IfThenPattern | DayIfThenPattern | GroupIfThen => SummarizerSet::IfThen,
            Comparison => SummarizerSet::Comparison,
            GoalComparison => SummarizerSet::GoalComparison,
            ClusterBasedPattern | StandardPattern | GroupClusterPattern | GroupStandardPattern => {
                SummarizerSet::ClusterBased
            }
        }
    }

    /// Group-level type used when aggregating this individual type.
    pub fn group_type(self) -> ProtoformType {
        use ProtoformType::*;
        match self {
            ClusterBasedPattern => GroupClusterPattern,
            StandardPattern => GroupStandardPattern,
            IfThenPattern | DayIfThenPattern | GeneralIfThen => GroupIfThen,
            _ => GroupPopulationEval,
        }
    }

    pub fn metric_policy(self) -> MetricPolicy {
        use ProtoformType::*;
        match self {
            StandardEvalTW | Comparison | GoalComparison | StandardPattern => {
                MetricPolicy::Unquantified
            }
            GoalAssistance => MetricPolicy::LengthOnly,
            IfThenPattern | DayIfThenPattern => MetricPolicy::Rule,
            _ => MetricPolicy::Quantified,
        }
    }

    pub fn is_group(self) -> bool {
        Self::GROUP.contains(&self)
    }
}

impl fmt::Display for ProtoformType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProtoformType {
    type Err = String;

    /// Case-insensitive; dashes and underscores are ignored.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let norm = |x: &str| {
            x.chars()
                .filter(|c| *c != '-' && *c != '_')
                .collect::<String>()
                .to_lowercase()
        };
        let want = norm(s);
        Self::INDIVIDUAL
            .iter()
            .chain(Self::GROUP.iter())
            .copied()
            .find(|t| norm(t.name()) == want)
            .ok_or_else(|| format!("unknown protoform type `{s}`"))
    }
}

/// Parses a comma-separated protoform list; `all` selects every type.
pub fn parse_protoform_list(s: &str) -> Result<Option<BTreeSet<ProtoformType>>, String> {
    if s.trim().eq_ignore_ascii_case("all") {
        return Ok(None);
    }
    s.split(',')
        .map(|t| t.trim().parse())
        .collect::<Result<BTreeSet<_>, _>>()
        .map(Some)
}

/// An attribute paired with a summarizer label.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Clause {
    pub attribute: String,
    pub label: String,
}

impl Clause {
    pub fn new(attribute: impl Into<String>, label: impl Into<String>) -> Self {
        Self {
            attribute: attribute.into(),
            label: label.into(),
        }
    }
}

/// One step of a rule prefix or suffix.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleStep {
    pub weekday: Option<Weekday>,
    pub clauses: Vec<Clause>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RuleDetail {
    pub prefix: Vec<RuleStep>,
    pub suffix: Vec<RuleStep>,
}

/// What `supporting_points` indexes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SupportUnit {
    /// Day indices into the frame.
    Days,
    /// Index of the first day of each consecutive-day pair.
    DayPairs,
    /// Start day index of each rule occurrence.
    Occurrences,
    /// Window ordinals of cluster members whose follower supports the summary.
    Windows,
    /// Positions of users in the cohort.
    Users,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    #[serde(rename = "type")]
    pub kind: ProtoformType,
    /// For group summaries, the aggregated individual type.
    pub group_of: Option<ProtoformType>,
    pub attributes: Vec<String>,
    pub text: String,
    pub quantifier: Option<String>,
    pub truth: Option<f64>,
    /// Summarizer labels in sentence order.
    pub summarizers: Vec<String>,
    /// Qualifier or antecedent clauses.
    pub conditions: Vec<Clause>,
    pub conclusions: Vec<Clause>,
    /// Labels of the preceding description (cluster-based patterns).
    pub description: Vec<Vec<String>>,
    pub rule: Option<RuleDetail>,
    pub weekday: Option<Weekday>,
    /// Goal labels, one per conclusion, for goal types.
    pub goal_labels: Vec<String>,
    /// Inner quantifier of the underlying summary (group level).
    pub inner_quantifier: Option<String>,
    pub query_window: Option<usize>,
    pub comparison_window: Option<usize>,
    pub r_values: Vec<f64>,
    pub attribute_ratios: Vec<f64>,
    pub confidence: Option<f64>,
    pub query_size: usize,
    pub support_unit: SupportUnit,
    pub supporting_points: Vec<usize>,
    pub metrics: MetricSet,
}

impl Summary {
    /// Ratio implied by the supporting points.
    pub fn support_ratio(&self) -> Option<f64> {
        (self.query_size > 0).then(|| self.supporting_points.len() as f64 / self.query_size as f64)
    }
}
