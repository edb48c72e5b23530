//! Individual-level summary generators.

use std::collections::{BTreeMap, BTreeSet};

use chrono::Weekday;
use itertools::Itertools;

use super::templates::{capitalize, fill, join_clauses, TemplateEntry, TemplateError};
use super::{
    Clause, ProtoformError, ProtoformType, RuleDetail, RuleStep, Summary, SupportUnit,
};
use crate::discretize::WindowSpan;
use crate::frame::Frame;
use crate::fuzzy::{best_pair, best_quantifier, CandidatePair, Quantifier};
use crate::metrics::{self, MetricInputs};
use crate::mining::{
    estimate_threshold, follower_pairs, mine_event_rules, squeezer, Event, RuleQuery, WindowTuple,
};
use crate::model::{weekday_name, Granularity, Letter, RunConfig, SummarizerSet, Vocabulary};

use super::templates::TemplateRegistry;

/// Everything a generator needs besides the data.
#[derive(Debug, Clone, Copy)]
pub struct GenContext<'a> {
    pub config: &'a RunConfig,
    pub vocab: &'a Vocabulary,
    pub templates: &'a TemplateRegistry,
}

impl<'a> GenContext<'a> {
    pub fn new(config: &'a RunConfig, vocab: &'a Vocabulary, templates: &'a TemplateRegistry) -> Self {
        Self {
            config,
            vocab,
            templates,
        }
    }

    fn quantifiers(&self) -> &[Quantifier] {
        &self.vocab.quantifiers
    }

    fn label(&self, set: SummarizerSet, i: usize) -> String {
        self.vocab.set(set)[i].clone()
    }
}

const SUBWINDOW: &str = "day";
const SUBWINDOWS: &str = "days";

/// Renders a summary with an individual or group template.
pub(crate) fn render(
    entry: &TemplateEntry,
    s: &Summary,
    ctx: &GenContext,
    granularity: Granularity,
    possessive: &str,
) -> Result<String, TemplateError> {
    let phrase = |a: &str| ctx.vocab.attribute_phrase(a);
    let mut base: Vec<(&str, String)> = vec![
        ("your", possessive.to_string()),
        ("window", granularity.window_noun().to_string()),
        ("windows", granularity.window_plural().to_string()),
        ("subwindow", SUBWINDOW.to_string()),
        ("subwindows", SUBWINDOWS.to_string()),
        (
            "scope",
            if granularity.is_windowed() {
                format!("in the past {}", granularity.window_noun())
            } else {
                "on record".to_string()
            },
        ),
        (
            "then",
            if s.conclusions.len() > 1 { "they were" } else { "it was" }.to_string(),
        ),
    ];
    // "about the same as", otherwise "higher than"
    let equal_label = match s.group_of.unwrap_or(s.kind) {
        ProtoformType::Comparison => ctx.vocab.set(SummarizerSet::Comparison).last(),
        ProtoformType::GoalComparison => ctx.vocab.set(SummarizerSet::GoalComparison).last(),
        _ => None,
    };
    let all_equal = !s.conclusions.is_empty()
        && equal_label.is_some_and(|l| s.conclusions.iter().all(|c| &c.label == l));
    base.push(("than", if all_equal { "as" } else { "than" }.to_string()));
    if let Some(q) = &s.quantifier {
        base.push(("quantifier", q.clone()));
    }
    if let Some(q) = &s.inner_quantifier {
        base.push(("inner_quantifier", q.clone()));
    }
    if let Some(n) = s.query_window {
        base.push(("number", n.to_string()));
    }
    if let Some(n) = s.comparison_window {
        base.push(("other_number", n.to_string()));
    }
    if let Some(c) = s.confidence {
        base.push(("confidence", format!("{}%", (c * 100.0).round())));
    }
    if let Some(d) = s.weekday {
        base.push(("weekdays", format!("{}s", weekday_name(d))));
    }
    if let Some(g) = &ctx.config.diet_guideline {
        base.push(("guideline", g.name.clone()));
    }
    let with = |extra: &[(&'static str, String)]| -> Vec<(&str, String)> {
        let mut v = base.clone();
        v.extend(extra.iter().cloned());
        v
    };
    let run = |t: &str, vars: &[(&str, String)]| -> Result<String, TemplateError> {
        let refs: Vec<(&str, &str)> = vars.iter().map(|(k, v)| (*k, v.as_str())).collect();
        fill(t, &refs)
    };
    let condition_tpl = || {
        entry
            .condition
            .as_deref()
            .ok_or_else(|| TemplateError::MissingValue("condition".into()))
    };

    let mut top: Vec<(&'static str, String)> = Vec::new();
    if let Some(rule) = &s.rule {
        let seqs = |steps: &[RuleStep], step_tpl: &str| -> Result<Vec<(String, String)>, TemplateError> {
            let attrs: Vec<String> = steps
                .iter()
                .flat_map(|st| st.clauses.iter().map(|c| c.attribute.clone()))
                .unique()
                .collect();
            attrs
                .into_iter()
                .map(|a| {
                    let parts = steps
                        .iter()
                        .filter_map(|st| {
                            let c = st.clauses.iter().find(|c| c.attribute == a)?;
                            let mut v = vec![("summarizer", entry.phrase(&c.label).to_string())];
                            if let Some(d) = st.weekday {
                                v.push(("weekday", weekday_name(d).to_string()));
                            }
                            Some(run(step_tpl, &with(&v)))
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    Ok((a, parts.join(", then ")))
                })
                .collect()
        };
        let conds = seqs(&rule.prefix, &entry.condition_step)?
            .into_iter()
            .map(|(a, seq)| {
                run(
                    condition_tpl()?,
                    &with(&[("attribute", phrase(&a)), ("sequence", seq)]),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        let clauses = seqs(&rule.suffix, &entry.clause_step)?
            .into_iter()
            .map(|(a, seq)| run(&entry.clause, &with(&[("attribute", phrase(&a)), ("sequence", seq)])))
            .collect::<Result<Vec<_>, _>>()?;
        let n = rule.suffix.len();
        top.push(("conditions", join_clauses(&conds)));
        top.push(("clauses", join_clauses(&clauses)));
        top.push((
            "horizon",
            if n == 1 {
                format!("the next {SUBWINDOW}")
            } else {
                format!("over the next {n} {SUBWINDOWS}")
            },
        ));
    } else {
        let clause = |c: &Clause, i: usize, tpl: &str| {
            let mut v = vec![
                ("attribute", phrase(&c.attribute)),
                ("summarizer", entry.phrase(&c.label).to_string()),
            ];
            if let Some(g) = s.goal_labels.get(i) {
                v.push(("goal", g.clone()));
            }
            run(tpl, &with(&v))
        };
        let clauses = s
            .conclusions
            .iter()
            .enumerate()
            .map(|(i, c)| clause(c, i, &entry.clause))
            .collect::<Result<Vec<_>, _>>()?;
        top.push(("clauses", join_clauses(&clauses)));
        if !s.conditions.is_empty() {
            let tpl = condition_tpl()?;
            let conds = s
                .conditions
                .iter()
                .map(|c| clause(c, usize::MAX, tpl))
                .collect::<Result<Vec<_>, _>>()?;
            top.push(("conditions", join_clauses(&conds)));
        }
    }
    if let (Some(desc), Some(desc_clause)) = (&entry.description, &entry.description_clause) {
        let parts = s
            .attributes
            .iter()
            .zip(&s.description)
            .map(|(a, labels)| {
                run(
                    desc_clause,
                    &with(&[("attribute", phrase(a)), ("sequence", labels.join(", then "))]),
                )
            })
            .collect::<Result<Vec<_>, _>>()?;
        let d = run(desc, &with(&[("description_clauses", join_clauses(&parts))]))?;
        top.push(("description", d));
    }
    Ok(capitalize(&run(&entry.sentence, &with(&top))?))
}

/// Joint label-combination counts over a set of items.
struct Tally {
    sizes: Vec<usize>,
    counts: Vec<usize>,
    total: usize,
}

impl Tally {
    fn new(sizes: Vec<usize>) -> Self {
        let n = sizes.iter().product();
        Self {
            sizes,
            counts: vec![0; n],
            total: 0,
        }
    }

    fn index(&self, combo: &[usize]) -> usize {
        combo
            .iter()
            .zip(&self.sizes)
            .fold(0, |acc, (&c, &s)| acc * s + c)
    }

    fn combo(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.sizes.len()];
        for k in (0..self.sizes.len()).rev() {
            out[k] = idx % self.sizes[k];
            idx /= self.sizes[k];
        }
        out
    }

    fn add(&mut self, combo: &[usize]) {
        let i = self.index(combo);
        self.counts[i] += 1;
        self.total += 1;
    }

    fn ratios(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.total as f64)
            .collect()
    }

    /// Best (combination, pair). Combinations with no support are left out
    /// unless nothing has support.
    fn choose(&self, quantifiers: &[Quantifier]) -> Option<(Vec<usize>, CandidatePair)> {
        if self.total == 0 {
            return None;
        }
        let ratios = self.ratios();
        let mut idx: Vec<usize> = (0..ratios.len()).filter(|&i| ratios[i] > 0.0).collect();
        if idx.is_empty() {
            idx = (0..ratios.len()).collect();
        }
        let cands: Vec<(String, f64)> = idx
            .iter()
            .map(|&i| {
                let letters: String = self.combo(i).iter().map(|&c| (b'a' + c as u8) as char).collect();
                (letters, ratios[i])
            })
            .collect();
        let pair = best_pair(&cands, quantifiers)?;
        Some((self.combo(idx[pair.summarizer_index]), pair))
    }
}

fn letters_of(frame: &Frame, i: usize) -> Vec<usize> {
    frame.tracks.iter().map(|t| t.letters[i].index()).collect()
}

fn alphabet_sizes(frame: &Frame) -> Vec<usize> {
    frame.tracks.iter().map(|t| t.alphabet_size()).collect()
}

fn letter_clauses(frame: &Frame, attrs: &[usize], combo: &[usize]) -> Vec<Clause> {
    attrs
        .iter()
        .zip(combo)
        .map(|(&k, &c)| {
            let t = &frame.tracks[k];
            Clause::new(&t.attribute, t.label(Letter(c as u8)))
        })
        .collect()
}

fn blank(kind: ProtoformType, frame: &Frame) -> Summary {
    Summary {
        kind,
        group_of: None,
        attributes: frame.attributes(),
        text: String::new(),
        quantifier: None,
        truth: None,
        summarizers: Vec::new(),
        conditions: Vec::new(),
        conclusions: Vec::new(),
        description: Vec::new(),
        rule: None,
        weekday: None,
        goal_labels: Vec::new(),
        inner_quantifier: None,
        query_window: None,
        comparison_window: None,
        r_values: Vec::new(),
        attribute_ratios: Vec::new(),
        confidence: None,
        query_size: 0,
        support_unit: SupportUnit::Days,
        supporting_points: Vec::new(),
        metrics: metrics::compute(kind.metric_policy(), &MetricInputs::default(), false),
    }
}

/// Computes metrics and text.
fn finish(
    mut s: Summary,
    inputs: MetricInputs,
    frame: &Frame,
    ctx: &GenContext,
) -> Result<Summary, ProtoformError> {
    if s.summarizers.is_empty() {
        s.summarizers = s
            .conditions
            .iter()
            .chain(&s.conclusions)
            .map(|c| c.label.clone())
            .collect();
    }
    let inputs = MetricInputs {
        summarizer_count: s.summarizers.len(),
        ..inputs
    };
    s.metrics = metrics::compute(s.kind.metric_policy(), &inputs, ctx.config.literal_coverage);
    if s.r_values.is_empty() {
        s.r_values = inputs.r_values.clone();
    }
    if s.attribute_ratios.is_empty() {
        s.attribute_ratios = inputs.attribute_ratios.clone();
    }
    let entry = ctx.templates.individual(s.kind)?;
    s.text = render(entry, &s, ctx, frame.granularity, &ctx.templates.possessive)?;
    Ok(s)
}

fn query_days(frame: &Frame) -> Result<(Option<&WindowSpan>, Vec<usize>), ProtoformError> {
    let w = frame
        .last_full_window()
        .ok_or(ProtoformError::NoCompleteWindow)?;
    let days = w.range().collect();
    Ok((frame.granularity.is_windowed().then_some(w), days))
}

fn per_attribute_ratios(frame: &Frame, days: &[usize], attrs: &[usize], combo: &[usize]) -> Vec<f64> {
    attrs
        .iter()
        .zip(combo)
        .map(|(&k, &c)| {
            let hits = days
                .iter()
                .filter(|&&i| frame.tracks[k].letters[i].index() == c)
                .count();
            hits as f64 / days.len() as f64
        })
        .collect()
}

/// Window-level letters of the last full window.
pub fn gen_standard_eval_tw(frame: &Frame, ctx: &GenContext) -> Result<Summary, ProtoformError> {
    let w = frame
        .last_full_window()
        .ok_or(ProtoformError::NoCompleteWindow)?;
    let mut s = blank(ProtoformType::StandardEvalTW, frame);
    s.conclusions = frame
        .tracks
        .iter()
        .map(|t| Clause::new(&t.attribute, t.label(t.window_letter(w.range()))))
        .collect();
    s.query_window = Some(w.ordinal);
    s.query_size = w.len();
    s.supporting_points = w.range().collect();
    finish(s, MetricInputs::default(), frame, ctx)
}

/// Quantified summary over the days of the last full window (or all days
/// without windows).
pub fn gen_standard_eval_stw(frame: &Frame, ctx: &GenContext) -> Result<Summary, ProtoformError> {
    let (w, days) = query_days(frame)?;
    let mut tally = Tally::new(alphabet_sizes(frame));
    for &i in &days {
        tally.add(&letters_of(frame, i));
    }
    let (combo, pair) = tally.choose(ctx.quantifiers()).expect("days are non-empty");
    let attrs: Vec<usize> = (0..frame.tracks.len()).collect();
    let mut s = blank(ProtoformType::StandardEvalSTW, frame);
    s.conclusions = letter_clauses(frame, &attrs, &combo);
    s.quantifier = Some(pair.quantifier.clone());
    s.truth = Some(pair.truth);
    s.query_window = w.map(|w| w.ordinal);
    s.query_size = days.len();
    s.supporting_points = days
        .iter()
        .copied()
        .filter(|&i| letters_of(frame, i) == combo)
        .collect();
    let inputs = MetricInputs {
        truth: pair.truth,
        r_values: tally.ratios(),
        covering: pair.ratio,
        attribute_ratios: per_attribute_ratios(frame, &days, &attrs, &combo),
        coverage_ratio: pair.ratio,
        summarizer_count: 0,
    };
    finish(s, inputs, frame, ctx)
}

/// One summary per (qualifier attribute, letter present in the last full window).
pub fn gen_qualifier(frame: &Frame, ctx: &GenContext) -> Result<Vec<Summary>, ProtoformError> {
    if !frame.is_multivariate() {
        return Err(ProtoformError::SingleAttribute);
    }
    let (w, days) = query_days(frame)?;
    let n = frame.tracks.len();
    let mut out = Vec::new();
    for q in 0..n {
        let present: BTreeSet<usize> = days
            .iter()
            .map(|&i| frame.tracks[q].letters[i].index())
            .collect();
        let others: Vec<usize> = (0..n).filter(|&k| k != q).collect();
        for letter in present {
            let subset: Vec<usize> = days
                .iter()
                .copied()
                .filter(|&i| frame.tracks[q].letters[i].index() == letter)
                .collect();
            let sizes = others.iter().map(|&k| frame.tracks[k].alphabet_size()).collect();
            let mut tally = Tally::new(sizes);
            let pick = |i: usize| -> Vec<usize> {
                others.iter().map(|&k| frame.tracks[k].letters[i].index()).collect()
            };
            for &i in &subset {
                tally.add(&pick(i));
            }
            let Some((combo, pair)) = tally.choose(ctx.quantifiers()) else {
                continue;
            };
            let supporting: Vec<usize> = subset.iter().copied().filter(|&i| pick(i) == combo).collect();
            let mut s = blank(ProtoformType::StandardEvalQualifier, frame);
            s.conditions = letter_clauses(frame, &[q], &[letter]);
            s.conclusions = letter_clauses(frame, &others, &combo);
            s.quantifier = Some(pair.quantifier.clone());
            s.truth = Some(pair.truth);
            s.query_window = w.map(|w| w.ordinal);
            s.query_size = subset.len();
            let mut attr_ratios = vec![subset.len() as f64 / days.len() as f64];
            attr_ratios.extend(per_attribute_ratios(frame, &days, &others, &combo));
            let inputs = MetricInputs {
                truth: pair.truth,
                r_values: tally.ratios(),
                covering: pair.ratio,
                attribute_ratios: attr_ratios,
                coverage_ratio: supporting.len() as f64 / days.len() as f64,
                summarizer_count: 0,
            };
            s.supporting_points = supporting;
            out.push(finish(s, inputs, frame, ctx)?);
        }
    }
    Ok(out)
}

fn goals_for<'a>(frame: &Frame, ctx: &'a GenContext) -> Result<Vec<&'a crate::model::Goal>, ProtoformError> {
    frame
        .tracks
        .iter()
        .map(|t| {
            ctx.config
                .goal_for(&t.attribute)
                .ok_or_else(|| ProtoformError::MissingGoal(t.attribute.clone()))
        })
        .collect()
}

/// Whether each day met each attribute's goal: 0 reached, 1 not reached.
fn goal_flags(frame: &Frame, goals: &[&crate::model::Goal], i: usize) -> Vec<usize> {
    frame
        .tracks
        .iter()
        .zip(goals)
        .map(|(t, g)| usize::from(!g.reached(t.raw[i])))
        .collect()
}

pub fn gen_goal_evaluation(frame: &Frame, ctx: &GenContext) -> Result<Summary, ProtoformError> {
    let goals = goals_for(frame, ctx)?;
    let (w, days) = query_days(frame)?;
    let mut tally = Tally::new(vec![2; frame.tracks.len()]);
    for &i in &days {
        tally.add(&goal_flags(frame, &goals, i));
    }
    let (combo, pair) = tally.choose(ctx.quantifiers()).expect("days are non-empty");
    let mut s = blank(ProtoformType::GoalEvaluation, frame);
    s.conclusions = frame
        .tracks
        .iter()
        .zip(&combo)
        .map(|(t, &c)| Clause::new(&t.attribute, ctx.label(SummarizerSet::GoalEvaluation, c)))
        .collect();
    s.goal_labels = goals.iter().map(|g| g.label.clone()).collect();
    s.quantifier = Some(pair.quantifier.clone());
    s.truth = Some(pair.truth);
    s.query_window = w.map(|w| w.ordinal);
    s.query_size = days.len();
    s.supporting_points = days
        .iter()
        .copied()
        .filter(|&i| goal_flags(frame, &goals, i) == combo)
        .collect();
    let attr_ratios = (0..frame.tracks.len())
        .map(|k| {
            days.iter()
                .filter(|&&i| goal_flags(frame, &goals, i)[k] == combo[k])
                .count() as f64
                / days.len() as f64
        })
        .collect();
    let inputs = MetricInputs {
        truth: pair.truth,
        r_values: tally.ratios(),
        covering: pair.ratio,
        attribute_ratios: attr_ratios,
        coverage_ratio: pair.ratio,
        summarizer_count: 0,
    };
    finish(s, inputs, frame, ctx)
}

/// Advice to move last-full-window means into the guideline ranges.
/// Returns `None` when every attribute is already within range.
pub fn gen_goal_assistance(frame: &Frame, ctx: &GenContext) -> Result<Option<Summary>, ProtoformError> {
    let guideline = ctx
        .config
        .diet_guideline
        .as_ref()
        .ok_or(ProtoformError::MissingGuideline)?;
    let w = frame
        .last_full_window()
        .ok_or(ProtoformError::NoCompleteWindow)?;
    let mut conclusions = Vec::new();
    for t in &frame.tracks {
        let Some(target) = guideline.targets.get(&t.attribute) else {
            continue;
        };
        let mean = t.window_mean(w.range());
        if target.min.is_some_and(|m| mean < m) {
            conclusions.push(Clause::new(&t.attribute, ctx.label(SummarizerSet::GoalAssistance, 0)));
        } else if target.max.is_some_and(|m| mean > m) {
            conclusions.push(Clause::new(&t.attribute, ctx.label(SummarizerSet::GoalAssistance, 1)));
        }
    }
    if conclusions.is_empty() {
        return Ok(None);
    }
    let mut s = blank(ProtoformType::GoalAssistance, frame);
    s.conclusions = conclusions;
    s.query_window = Some(w.ordinal);
    s.query_size = w.len();
    s.supporting_points = w.range().collect();
    finish(s, MetricInputs::default(), frame, ctx).map(Some)
}

/// Summary over all days falling on `weekday`. Returns `None` when the
/// result is too weak to emit.
pub fn gen_day_based(
    frame: &Frame,
    weekday: Weekday,
    ctx: &GenContext,
) -> Result<Option<Summary>, ProtoformError> {
    let days: Vec<usize> = (0..frame.len()).filter(|&i| frame.weekday(i) == weekday).collect();
    if days.len() < 2 {
        return Err(ProtoformError::TooFewOccurrences);
    }
    let mut tally = Tally::new(alphabet_sizes(frame));
    for &i in &days {
        tally.add(&letters_of(frame, i));
    }
    let (combo, pair) = tally.choose(ctx.quantifiers()).expect("days are non-empty");
    let most_rank = ctx.vocab.quantifier("most of the").map(|q| q.rank).unwrap_or(5);
    if pair.quantifier_rank < most_rank && pair.truth < ctx.config.day_emission_threshold {
        return Ok(None);
    }
    let attrs: Vec<usize> = (0..frame.tracks.len()).collect();
    let mut s = blank(ProtoformType::DayBasedPattern, frame);
    s.conclusions = letter_clauses(frame, &attrs, &combo);
    s.weekday = Some(weekday);
    s.quantifier = Some(pair.quantifier.clone());
    s.truth = Some(pair.truth);
    s.query_size = days.len();
    s.supporting_points = days
        .iter()
        .copied()
        .filter(|&i| letters_of(frame, i) == combo)
        .collect();
    let inputs = MetricInputs {
        truth: pair.truth,
        r_values: tally.ratios(),
        covering: pair.ratio,
        attribute_ratios: per_attribute_ratios(frame, &days, &attrs, &combo),
        coverage_ratio: pair.ratio,
        summarizer_count: 0,
    };
    finish(s, inputs, frame, ctx).map(Some)
}

/// "In general, if X is L, then Y is M" over all days.
pub fn gen_general_ifthen(frame: &Frame, ctx: &GenContext) -> Result<Vec<Summary>, ProtoformError> {
    let n = frame.tracks.len();
    if n < 2 {
        return Err(ProtoformError::SingleAttribute);
    }
    let mut out = Vec::new();
    for mask in 1..(1usize << n) - 1 {
        let ante: Vec<usize> = (0..n).filter(|k| mask & (1 << k) != 0).collect();
        let cons: Vec<usize> = (0..n).filter(|k| mask & (1 << k) == 0).collect();
        let pick = |i: usize, ks: &[usize]| -> Vec<usize> {
            ks.iter().map(|&k| frame.tracks[k].letters[i].index()).collect()
        };
        let mut groups: BTreeMap<Vec<usize>, Vec<usize>> = BTreeMap::new();
        for i in 0..frame.len() {
            groups.entry(pick(i, &ante)).or_default().push(i);
        }
        for (a_combo, a_days) in groups {
            // a single occurrence always gives full confidence; skip it
            if a_days.len() < 2 {
                continue;
            }
            let sizes = cons.iter().map(|&k| frame.tracks[k].alphabet_size()).collect();
            let mut tally = Tally::new(sizes);
            for &i in &a_days {
                tally.add(&pick(i, &cons));
            }
            let (best_idx, &best_count) = tally
                .counts
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(&a.0)))
                .expect("non-empty tally");
            let confidence = best_count as f64 / a_days.len() as f64;
            if confidence < ctx.config.min_confidence {
                continue;
            }
            let c_combo = tally.combo(best_idx);
            let (q, mu) = best_quantifier(ctx.quantifiers(), confidence).expect("quantifiers exist");
            let supporting: Vec<usize> = a_days
                .iter()
                .copied()
                .filter(|&i| pick(i, &cons) == c_combo)
                .collect();
            let mut s = blank(ProtoformType::GeneralIfThen, frame);
            s.conditions = letter_clauses(frame, &ante, &a_combo);
            s.conclusions = letter_clauses(frame, &cons, &c_combo);
            s.quantifier = Some(q.name.clone());
            s.truth = Some(mu);
            s.confidence = Some(confidence);
            s.query_size = a_days.len();
            let inputs = MetricInputs {
                truth: mu,
                r_values: tally.ratios(),
                covering: confidence,
                attribute_ratios: per_attribute_ratios(frame, &a_days, &cons, &c_combo),
                coverage_ratio: supporting.len() as f64 / frame.len() as f64,
                summarizer_count: 0,
            };
            s.supporting_points = supporting;
            out.push(finish(s, inputs, frame, ctx)?);
        }
    }
    Ok(out)
}

/// 0 increased, 1 decreased, 2 stayed the same.
fn direction(delta: f64, eps: f64) -> usize {
    if delta > eps {
        0
    } else if delta < -eps {
        1
    } else {
        2
    }
}

/// Day-to-day direction over every pair of consecutive logged days.
pub fn gen_standard_trend(frame: &Frame, ctx: &GenContext) -> Result<Summary, ProtoformError> {
    let pairs = frame.consecutive_pairs();
    if pairs.is_empty() {
        return Err(ProtoformError::TooShort);
    }
    let eps = ctx.config.trend_epsilon;
    let dirs = |(a, b): (usize, usize)| -> Vec<usize> {
        frame
            .tracks
            .iter()
            .map(|t| direction(t.raw[b] - t.raw[a], eps))
            .collect()
    };
    let mut tally = Tally::new(vec![3; frame.tracks.len()]);
    for &p in &pairs {
        tally.add(&dirs(p));
    }
    let (combo, pair) = tally.choose(ctx.quantifiers()).expect("pairs are non-empty");
    let mut s = blank(ProtoformType::StandardTrend, frame);
    s.conclusions = frame
        .tracks
        .iter()
        .zip(&combo)
        .map(|(t, &c)| Clause::new(&t.attribute, ctx.label(SummarizerSet::StandardTrend, c)))
        .collect();
    s.quantifier = Some(pair.quantifier.clone());
    s.truth = Some(pair.truth);
    s.query_size = pairs.len();
    s.support_unit = SupportUnit::DayPairs;
    s.supporting_points = pairs
        .iter()
        .filter(|&&p| dirs(p) == combo)
        .map(|&(a, _)| a)
        .collect();
    let attr_ratios = (0..frame.tracks.len())
        .map(|k| pairs.iter().filter(|&&p| dirs(p)[k] == combo[k]).count() as f64 / pairs.len() as f64)
        .collect();
    let inputs = MetricInputs {
        truth: pair.truth,
        r_values: tally.ratios(),
        covering: pair.ratio,
        attribute_ratios: attr_ratios,
        coverage_ratio: pair.ratio,
        summarizer_count: 0,
    };
    finish(s, inputs, frame, ctx)
}

fn event_segments(frame: &Frame, with_weekday: bool) -> Vec<Vec<Event>> {
    frame
        .segments()
        .into_iter()
        .map(|r| {
            r.map(|i| Event {
                weekday: with_weekday.then(|| frame.weekday(i).num_days_from_monday() as u8),
                letters: frame.day_letters(i),
            })
            .collect()
        })
        .collect()
}

fn weekday_from(n: u8) -> Weekday {
    Weekday::try_from(n).expect("weekday index below 7")
}

fn rules_to_summaries(
    frame: &Frame,
    ctx: &GenContext,
    kind: ProtoformType,
    day_annotated: bool,
) -> Result<Vec<Summary>, ProtoformError> {
    let w = frame
        .last_full_window()
        .ok_or(ProtoformError::NoCompleteWindow)?;
    let max_len = w.len();
    let segments = event_segments(frame, day_annotated);
    let n = frame.tracks.len();
    let prefix_attrs: Vec<Option<usize>> = if n == 1 || ctx.config.prefix_all_attributes {
        vec![None]
    } else {
        (0..n).map(Some).collect()
    };
    let starts: Vec<usize> = frame.segments().into_iter().flat_map(|r| r.collect::<Vec<_>>()).collect();
    let seg_of: Vec<usize> = frame
        .segments()
        .into_iter()
        .flat_map(|r| {
            let end = r.end;
            r.map(move |_| end)
        })
        .collect();
    let mut out = Vec::new();
    for attr in prefix_attrs {
        let q = RuleQuery {
            max_len,
            min_support: ctx.config.min_support,
            min_confidence: ctx.config.min_confidence,
            prefix_attribute: attr,
            day_annotated,
        };
        for rule in mine_event_rules(&segments, &q) {
            let prefix_tracks: Vec<usize> = match attr {
                Some(k) => vec![k],
                None => (0..n).collect(),
            };
            let step = |e: &Event, tracks: &[usize]| RuleStep {
                weekday: e.weekday.map(weekday_from),
                clauses: tracks
                    .iter()
                    .zip(&e.letters)
                    .map(|(&k, &l)| Clause::new(&frame.tracks[k].attribute, frame.tracks[k].label(l)))
                    .collect(),
            };
            let all: Vec<usize> = (0..n).collect();
            let detail = RuleDetail {
                prefix: rule.prefix.iter().map(|e| step(e, &prefix_tracks)).collect(),
                suffix: rule.suffix.iter().map(|e| step(e, &all)).collect(),
            };
            // occurrence starts, for provenance
            let plen = rule.prefix.len();
            let total = plen + rule.suffix.len();
            let occurrences: Vec<usize> = starts
                .iter()
                .copied()
                .filter(|&i| i + total <= seg_of[i])
                .filter(|&i| {
                    let ev = |j: usize| Event {
                        weekday: day_annotated.then(|| frame.weekday(j).num_days_from_monday() as u8),
                        letters: frame.day_letters(j),
                    };
                    (0..plen).all(|p| {
                        let e = ev(i + p);
                        let proj = match attr {
                            Some(k) => Event {
                                weekday: e.weekday,
                                letters: vec![e.letters[k]],
                            },
                            None => e,
                        };
                        proj == rule.prefix[p]
                    }) && (0..rule.suffix.len()).all(|s| ev(i + plen + s) == rule.suffix[s])
                })
                .collect();
            debug_assert_eq!(occurrences.len(), rule.support_count);
            let (q, mu) = best_quantifier(ctx.quantifiers(), rule.support).expect("quantifiers exist");
            let mut s = blank(kind, frame);
            s.conditions = detail.prefix.iter().flat_map(|st| st.clauses.clone()).collect();
            s.conclusions = detail.suffix.iter().flat_map(|st| st.clauses.clone()).collect();
            s.rule = Some(detail);
            s.quantifier = Some(q.name.clone());
            s.truth = Some(mu);
            s.confidence = Some(rule.confidence);
            s.query_size = rule.support_positions;
            s.support_unit = SupportUnit::Occurrences;
            s.supporting_points = occurrences;
            let inputs = MetricInputs {
                truth: mu,
                r_values: vec![rule.support],
                covering: rule.support,
                attribute_ratios: Vec::new(),
                coverage_ratio: rule.support,
                summarizer_count: 0,
            };
            out.push(finish(s, inputs, frame, ctx)?);
        }
    }
    Ok(out)
}

/// If-then rules over consecutive days; the window length bounds rule length.
pub fn gen_ifthen(frame: &Frame, ctx: &GenContext) -> Result<Vec<Summary>, ProtoformError> {
    rules_to_summaries(frame, ctx, ProtoformType::IfThenPattern, false)
}

/// If-then rules whose events carry weekdays.
pub fn gen_day_ifthen(frame: &Frame, ctx: &GenContext) -> Result<Vec<Summary>, ProtoformError> {
    rules_to_summaries(frame, ctx, ProtoformType::DayIfThenPattern, true)
}

/// Compares the last full window with an earlier one; with `with_goal`,
/// compares the number of days that met each goal.
pub fn gen_comparison(
    frame: &Frame,
    window_a: usize,
    window_b: usize,
    with_goal: bool,
    ctx: &GenContext,
) -> Result<Summary, ProtoformError> {
    let a = frame
        .complete_window(window_a)
        .ok_or(ProtoformError::IncompleteWindow(window_a))?;
    let b = frame
        .complete_window(window_b)
        .ok_or(ProtoformError::IncompleteWindow(window_b))?;
    let kind = if with_goal {
        ProtoformType::GoalComparison
    } else {
        ProtoformType::Comparison
    };
    let mut s = blank(kind, frame);
    let order = |x: usize, y: usize| match x.cmp(&y) {
        std::cmp::Ordering::Greater => 0,
        std::cmp::Ordering::Less => 1,
        std::cmp::Ordering::Equal => 2,
    };
    if with_goal {
        let goals = goals_for(frame, ctx)?;
        s.goal_labels = goals.iter().map(|g| g.label.clone()).collect();
        s.conclusions = frame
            .tracks
            .iter()
            .zip(&goals)
            .map(|(t, g)| {
                let met = |w: &WindowSpan| w.range().filter(|&i| g.reached(t.raw[i])).count();
                let c = order(met(a), met(b));
                Clause::new(&t.attribute, ctx.label(SummarizerSet::GoalComparison, c))
            })
            .collect();
    } else {
        s.conclusions = frame
            .tracks
            .iter()
            .map(|t| {
                let c = order(
                    t.window_letter(a.range()).index(),
                    t.window_letter(b.range()).index(),
                );
                Clause::new(&t.attribute, ctx.label(SummarizerSet::Comparison, c))
            })
            .collect();
    }
    s.query_window = Some(a.ordinal);
    s.comparison_window = Some(b.ordinal);
    s.query_size = a.len();
    s.supporting_points = a.range().collect();
    finish(s, MetricInputs::default(), frame, ctx)
}

/// Ordinal of the window compared against the last full one: half of it, rounded down.
pub fn comparison_window(last: usize) -> usize {
    last / 2
}

struct ClusterView {
    target: usize,
    /// (member window, letters at w, letters at w+1), ascending by window
    pairs: Vec<(usize, Vec<Letter>, Vec<Letter>)>,
}

fn cluster_view(frame: &Frame, ctx: &GenContext) -> Result<ClusterView, ProtoformError> {
    let target = frame
        .last_full_window()
        .ok_or(ProtoformError::NoCompleteWindow)?
        .ordinal;
    let tuples: Vec<WindowTuple<Vec<Letter>>> = frame
        .complete_windows()
        .map(|w| WindowTuple::new(w.ordinal, w.range().map(|i| frame.day_letters(i)).collect()))
        .collect();
    let est = estimate_threshold(
        &tuples,
        ctx.config.squeezer_sample_fraction,
        ctx.config.rng_seed,
    )
    .map_err(|_| ProtoformError::OrphanWindow)?;
    let clusters = squeezer(&tuples, est.threshold);
    let cluster = clusters
        .iter()
        .find(|c| c.contains(target))
        .ok_or(ProtoformError::OrphanWindow)?;
    let others: Vec<usize> = cluster.members.iter().copied().filter(|&m| m != target).collect();
    let letters: BTreeMap<usize, Vec<Letter>> = frame
        .complete_windows()
        .map(|w| (w.ordinal, frame.window_letters(w)))
        .collect();
    let pairs = follower_pairs(&others, &letters);
    if pairs.is_empty() {
        return Err(ProtoformError::OrphanWindow);
    }
    Ok(ClusterView { target, pairs })
}

/// 0 rose, 1 dropped, 2 stayed the same.
fn transition(now: &[Letter], next: &[Letter]) -> Vec<usize> {
    now.iter()
        .zip(next)
        .map(|(a, b)| match b.cmp(a) {
            std::cmp::Ordering::Greater => 0,
            std::cmp::Ordering::Less => 1,
            std::cmp::Ordering::Equal => 2,
        })
        .collect()
}

fn transition_clauses(frame: &Frame, ctx: &GenContext, combo: &[usize]) -> Vec<Clause> {
    frame
        .tracks
        .iter()
        .zip(combo)
        .map(|(t, &c)| Clause::new(&t.attribute, ctx.label(SummarizerSet::ClusterBased, c)))
        .collect()
}

/// What followed the windows that cluster with the last full window.
/// With `last_only`, reports only the most recent similar window.
pub fn gen_cluster_pattern(
    frame: &Frame,
    last_only: bool,
    ctx: &GenContext,
) -> Result<Summary, ProtoformError> {
    let view = cluster_view(frame, ctx)?;
    if last_only {
        let (w, now, next) = view.pairs.last().expect("pairs are non-empty");
        let mut s = blank(ProtoformType::StandardPattern, frame);
        s.conclusions = transition_clauses(frame, ctx, &transition(now, next));
        s.query_window = Some(view.target);
        s.comparison_window = Some(*w);
        s.query_size = 1;
        s.support_unit = SupportUnit::Windows;
        s.supporting_points = vec![*w];
        return finish(s, MetricInputs::default(), frame, ctx);
    }
    let mut tally = Tally::new(vec![3; frame.tracks.len()]);
    for (_, now, next) in &view.pairs {
        tally.add(&transition(now, next));
    }
    let (combo, pair) = tally.choose(ctx.quantifiers()).expect("pairs are non-empty");
    let target = frame.complete_window(view.target).expect("target is complete");
    let description: Vec<Vec<String>> = frame
        .tracks
        .iter()
        .map(|t| {
            target
                .range()
                .map(|i| t.letters[i])
                .dedup()
                .map(|l| t.label(l).to_string())
                .collect()
        })
        .collect();
    let mut s = blank(ProtoformType::ClusterBasedPattern, frame);
    s.conclusions = transition_clauses(frame, ctx, &combo);
    s.summarizers = description
        .iter()
        .flatten()
        .cloned()
        .chain(s.conclusions.iter().map(|c| c.label.clone()))
        .collect();
    s.description = description;
    s.quantifier = Some(pair.quantifier.clone());
    s.truth = Some(pair.truth);
    s.query_window = Some(view.target);
    s.query_size = view.pairs.len();
    s.support_unit = SupportUnit::Windows;
    s.supporting_points = view
        .pairs
        .iter()
        .filter(|(_, a, b)| transition(a, b) == combo)
        .map(|(w, _, _)| *w)
        .collect();
    let attr_ratios = (0..frame.tracks.len())
        .map(|k| {
            view.pairs
                .iter()
                .filter(|(_, a, b)| transition(a, b)[k] == combo[k])
                .count() as f64
                / view.pairs.len() as f64
        })
        .collect();
    let inputs = MetricInputs {
        truth: pair.truth,
        r_values: tally.ratios(),
        covering: pair.ratio,
        attribute_ratios: attr_ratios,
        coverage_ratio: pair.ratio,
        summarizer_count: 0,
    };
    finish(s, inputs, frame, ctx)
}

fn wanted(filter: Option<&BTreeSet<ProtoformType>>, t: ProtoformType) -> bool {
    filter.is_none_or(|f| f.contains(&t))
}

/// Runs every applicable generator on one frame in a fixed order.
/// Suppressed or inapplicable summaries are skipped.
pub fn generate_all(
    frame: &Frame,
    ctx: &GenContext,
    filter: Option<&BTreeSet<ProtoformType>>,
) -> Result<Vec<Summary>, TemplateError> {
    use ProtoformType::*;
    let windowed = frame.granularity.is_windowed();
    let allowed = |t: ProtoformType| {
        wanted(filter, t) && (windowed || ProtoformType::WINDOW_FREE.contains(&t))
    };
    let mut out = Vec::new();
    // template errors are configuration errors; everything else suppresses
    let mut keep = |r: Result<Vec<Summary>, ProtoformError>| -> Result<(), TemplateError> {
        match r {
            Ok(v) => {
                out.extend(v);
                Ok(())
            }
            Err(ProtoformError::Template(e)) => Err(e),
            Err(_) => Ok(()),
        }
    };
    let one = |r: Result<Summary, ProtoformError>| r.map(|s| vec![s]);
    let opt = |r: Result<Option<Summary>, ProtoformError>| r.map(|s| s.into_iter().collect());

    if allowed(StandardEvalTW) {
        keep(one(gen_standard_eval_tw(frame, ctx)))?;
    }
    if allowed(StandardEvalSTW) {
        keep(one(gen_standard_eval_stw(frame, ctx)))?;
    }
    if allowed(StandardEvalQualifier) && frame.is_multivariate() {
        keep(gen_qualifier(frame, ctx))?;
    }
    if allowed(GoalEvaluation) {
        keep(one(gen_goal_evaluation(frame, ctx)))?;
    }
    if allowed(GoalAssistance) {
        keep(opt(gen_goal_assistance(frame, ctx)))?;
    }
    if allowed(DayBasedPattern) {
        for d in [
            Weekday::Mon,
            Weekday::Tue,
            Weekday::Wed,
            Weekday::Thu,
            Weekday::Fri,
            Weekday::Sat,
            Weekday::Sun,
        ] {
            keep(opt(gen_day_based(frame, d, ctx)))?;
        }
    }
    if allowed(GeneralIfThen) && frame.is_multivariate() {
        keep(gen_general_ifthen(frame, ctx))?;
    }
    if allowed(StandardTrend) {
        keep(one(gen_standard_trend(frame, ctx)))?;
    }
    if allowed(IfThenPattern) {
        keep(gen_ifthen(frame, ctx))?;
    }
    if allowed(DayIfThenPattern) {
        keep(gen_day_ifthen(frame, ctx))?;
    }
    if let Some(last) = frame.last_full_window().map(|w| w.ordinal) {
        let other = comparison_window(last);
        if other >= 1 && other != last {
            if allowed(Comparison) {
                keep(one(gen_comparison(frame, last, other, false, ctx)))?;
            }
            if allowed(GoalComparison) {
                keep(one(gen_comparison(frame, last, other, true, ctx)))?;
            }
        }
    }
    if allowed(ClusterBasedPattern) {
        keep(one(gen_cluster_pattern(frame, false, ctx)))?;
    }
    if allowed(StandardPattern) {
        keep(one(gen_cluster_pattern(frame, true, ctx)))?;
    }
    Ok(out)
}
