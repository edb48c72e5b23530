//! Cohort-level aggregation of individual summaries.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use super::individual::{render, GenContext};
use super::{ProtoformType, Summary, SupportUnit, TemplateError};
use crate::fuzzy::best_quantifier;
use crate::metrics::{self, MetricInputs};
use crate::model::Granularity;

#[derive(Debug, Error, PartialEq)]
pub enum GroupError {
    #[error("group summaries need at least 2 users, got {0}")]
    CohortTooSmall(usize),
    #[error(transparent)]
    Template(#[from] TemplateError),
}

/// Types whose quantifier is part of what users must share.
fn keeps_inner_quantifier(t: ProtoformType) -> bool {
    matches!(
        t,
        ProtoformType::StandardEvalSTW
            | ProtoformType::StandardEvalQualifier
            | ProtoformType::GoalEvaluation
            | ProtoformType::StandardTrend
            | ProtoformType::DayBasedPattern
    )
}

/// Identity of a summary across users; window numbers are left out.
fn class_key(s: &Summary) -> String {
    let inner = keeps_inner_quantifier(s.kind).then_some(&s.quantifier);
    serde_json::to_string(&(
        s.kind,
        &s.attributes,
        &s.conditions,
        &s.conclusions,
        &s.goal_labels,
        inner,
        s.weekday,
        &s.rule,
    ))
    .expect("summary fields serialize")
}

struct Class<'a> {
    representative: &'a Summary,
    users: BTreeSet<usize>,
}

/// Aggregates per-user summaries into group summaries. `per_user[i]` holds
/// the individual summaries of user i.
pub fn gen_group(
    per_user: &[Vec<Summary>],
    granularity: Granularity,
    ctx: &GenContext,
) -> Result<Vec<Summary>, GroupError> {
    let n = per_user.len();
    if n < 2 {
        return Err(GroupError::CohortTooSmall(n));
    }
    let mut classes: BTreeMap<String, Class> = BTreeMap::new();
    for (u, summaries) in per_user.iter().enumerate() {
        for s in summaries.iter().filter(|s| !s.kind.is_group()) {
            classes
                .entry(class_key(s))
                .or_insert_with(|| Class {
                    representative: s,
                    users: BTreeSet::new(),
                })
                .users
                .insert(u);
        }
    }
    // classes sharing type and attributes compete for the same r-values
    let mut families: BTreeMap<(ProtoformType, Vec<String>), Vec<&Class>> = BTreeMap::new();
    for c in classes.values() {
        let r = c.representative;
        families.entry((r.kind, r.attributes.clone())).or_default().push(c);
    }
    let mut out = Vec::new();
    for ((kind, _), mut members) in families {
        members.sort_by_key(|c| std::cmp::Reverse(c.users.len()));
        let r_values: Vec<f64> = members.iter().map(|c| c.users.len() as f64 / n as f64).collect();
        for c in members {
            let rep = c.representative;
            let r = c.users.len() as f64 / n as f64;
            let (q, mu) = best_quantifier(&ctx.vocab.quantifiers, r).expect("quantifiers exist");
            let mut s = rep.clone();
            s.kind = kind.group_type();
            s.group_of = Some(kind);
            s.quantifier = Some(q.name.clone());
            s.inner_quantifier = rep.quantifier.clone();
            s.truth = Some(mu);
            s.query_window = None;
            s.comparison_window = None;
            s.description = Vec::new();
            s.summarizers = s
                .conditions
                .iter()
                .chain(&s.conclusions)
                .map(|c| c.label.clone())
                .collect();
            s.r_values = r_values.clone();
            s.attribute_ratios = Vec::new();
            s.query_size = n;
            s.support_unit = SupportUnit::Users;
            s.supporting_points = c.users.iter().copied().collect();
            let inputs = MetricInputs {
                truth: mu,
                r_values: r_values.clone(),
                covering: r,
                attribute_ratios: Vec::new(),
                coverage_ratio: r,
                summarizer_count: s.summarizers.len(),
            };
            s.metrics = metrics::compute(
                crate::metrics::MetricPolicy::Quantified,
                &inputs,
                ctx.config.literal_coverage,
            );
            let entry = ctx.templates.group(kind)?;
            s.text = render(entry, &s, ctx, granularity, &ctx.templates.group_possessive)?;
            out.push(s);
        }
    }
    Ok(out)
}
