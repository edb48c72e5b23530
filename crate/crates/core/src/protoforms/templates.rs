//! Template registry and placeholder filling.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::ProtoformType;

#[derive(Debug, Error, PartialEq)]
pub enum TemplateError {
    #[error("unknown placeholder `{{{0}}}`")]
    UnknownPlaceholder(String),
    #[error("placeholder `{{{0}}}` has no value here")]
    MissingValue(String),
    #[error("unclosed `{{` in template `{0}`")]
    Unclosed(String),
    #[error("no template for {0}")]
    MissingTemplate(String),
    #[error("invalid template file: {0}")]
    Invalid(String),
}

/// Placeholders a template may use.
pub const PLACEHOLDERS: &[&str] = &[
    "your",
    "attribute",
    "summarizer",
    "goal",
    "sequence",
    "weekday",
    "weekdays",
    "quantifier",
    "inner_quantifier",
    "window",
    "windows",
    "subwindow",
    "subwindows",
    "scope",
    "clauses",
    "conditions",
    "description",
    "description_clauses",
    "number",
    "other_number",
    "then",
    "than",
    "horizon",
    "confidence",
    "guideline",
];

fn default_step() -> String {
    "{summarizer}".to_string()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateEntry {
    pub sentence: String,
    /// Rendered once per conclusion clause.
    pub clause: String,
    /// Rendered once per condition clause (qualifiers, antecedents, prefixes).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<String>,
    /// One step of a condition sequence.
    #[serde(default = "default_step")]
    pub condition_step: String,
    /// One step of a conclusion sequence.
    #[serde(default = "default_step")]
    pub clause_step: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description_clause: Option<String>,
    /// Replacement wording for summarizer labels ("increased" -> "increases").
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub phrases: BTreeMap<String, String>,
}

impl TemplateEntry {
    fn new(sentence: &str, clause: &str) -> Self {
        Self {
            sentence: sentence.into(),
            clause: clause.into(),
            condition: None,
            condition_step: default_step(),
            clause_step: default_step(),
            description: None,
            description_clause: None,
            phrases: BTreeMap::new(),
        }
    }

    fn condition(mut self, c: &str) -> Self {
        self.condition = Some(c.into());
        self
    }

    fn steps(mut self, condition_step: &str, clause_step: &str) -> Self {
        self.condition_step = condition_step.into();
        self.clause_step = clause_step.into();
        self
    }

    fn describe(mut self, description: &str, clause: &str) -> Self {
        self.description = Some(description.into());
        self.description_clause = Some(clause.into());
        self
    }

    fn phrases(mut self, pairs: &[(&str, &str)]) -> Self {
        self.phrases = pairs
            .iter()
            .map(|(a, b)| (a.to_string(), b.to_string()))
            .collect();
        self
    }

    /// Display wording of a summarizer label.
    pub fn phrase<'a>(&'a self, label: &'a str) -> &'a str {
        self.phrases.get(label).map(String::as_str).unwrap_or(label)
    }

    fn texts(&self) -> Vec<&str> {
        let mut v = vec![
            self.sentence.as_str(),
            self.clause.as_str(),
            self.condition_step.as_str(),
            self.clause_step.as_str(),
        ];
        v.extend(self.condition.as_deref());
        v.extend(self.description.as_deref());
        v.extend(self.description_clause.as_deref());
        v
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TemplateRegistry {
    /// Possessive for individual sentences ("your"; "the" for stock or weather data).
    pub possessive: String,
    pub group_possessive: String,
    pub individual: BTreeMap<ProtoformType, TemplateEntry>,
    /// Group sentences, keyed by the individual type they aggregate.
    pub group: BTreeMap<ProtoformType, TemplateEntry>,
}

impl Default for TemplateRegistry {
    fn default() -> Self {
        default_registry()
    }
}

impl TemplateRegistry {
    /// Default sentences with a different possessive, e.g. "the" for stock
    /// prices or weather readings.
    pub fn with_possessive(possessive: &str) -> Self {
        Self {
            possessive: possessive.to_string(),
            ..default_registry()
        }
    }

    pub fn individual(&self, t: ProtoformType) -> Result<&TemplateEntry, TemplateError> {
        self.individual
            .get(&t)
            .ok_or_else(|| TemplateError::MissingTemplate(t.name().into()))
    }

    pub fn group(&self, t: ProtoformType) -> Result<&TemplateEntry, TemplateError> {
        self.group
            .get(&t)
            .ok_or_else(|| TemplateError::MissingTemplate(format!("group {}", t.name())))
    }

    pub fn validate(&self) -> Result<(), TemplateError> {
        for t in ProtoformType::INDIVIDUAL {
            self.individual(t)?;
            self.group(t)?;
        }
        for e in self.individual.values().chain(self.group.values()) {
            for text in e.texts() {
                for name in placeholders(text)? {
                    if !PLACEHOLDERS.contains(&name.as_str()) {
                        return Err(TemplateError::UnknownPlaceholder(name));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, TemplateError> {
        let r: TemplateRegistry =
            serde_json::from_str(text).map_err(|e| TemplateError::Invalid(e.to_string()))?;
        r.validate()?;
        Ok(r)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("registry serializes")
    }
}

/// Names of the placeholders in a template, in order.
pub fn placeholders(template: &str) -> Result<Vec<String>, TemplateError> {
    let mut out = Vec::new();
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        let after = &rest[open + 1..];
        let close = after
            .find('}')
            .ok_or_else(|| TemplateError::Unclosed(template.to_string()))?;
        out.push(after[..close].to_string());
        rest = &after[close + 1..];
    }
    Ok(out)
}

/// Replaces `{name}` placeholders with values.
pub fn fill(template: &str, vars: &[(&str, &str)]) -> Result<String, TemplateError> {
    let mut out = String::with_capacity(template.len() + 32);
    let mut rest = template;
    while let Some(open) = rest.find('{') {
        out.push_str(&rest[..open]);
        let after = &rest[open + 1..];
        let close = after
            .find('}')
            .ok_or_else(|| TemplateError::Unclosed(template.to_string()))?;
        let name = &after[..close];
        if !PLACEHOLDERS.contains(&name) {
            return Err(TemplateError::UnknownPlaceholder(name.to_string()));
        }
        let value = vars
            .iter()
            .find(|(k, _)| *k == name)
            .map(|(_, v)| *v)
            .ok_or_else(|| TemplateError::MissingValue(name.to_string()))?;
        out.push_str(value);
        rest = &after[close + 1..];
    }
    out.push_str(rest);
    Ok(out)
}

/// "A", "A and B", "A, B, and C".
pub fn join_clauses(items: &[String]) -> String {
    match items {
        [] => String::new(),
        [a] => a.clone(),
        [a, b] => format!("{a} and {b}"),
        [init @ .., last] => format!("{}, and {}", init.join(", "), last),
    }
}

pub fn capitalize(s: &str) -> String {
    let mut c = s.chars();
    match c.next() {
        Some(f) => f.to_uppercase().collect::<String>() + c.as_str(),
        None => String::new(),
    }
}

fn default_registry() -> TemplateRegistry {
    use ProtoformType::*;
    let trend_phrases = [
        ("increased", "increases"),
        ("decreased", "decreases"),
        ("stayed the same", "stays the same"),
    ];
    let mut ind = BTreeMap::new();
    ind.insert(
        StandardEvalTW,
        TemplateEntry::new(
            "In the past full {window}, {clauses}.",
            "{your} {attribute} has been {summarizer}",
        ),
    );
    ind.insert(
        StandardEvalSTW,
        TemplateEntry::new(
            "On {quantifier} {subwindows} {scope}, {clauses}.",
            "{your} {attribute} has been {summarizer}",
        ),
    );
    ind.insert(
        StandardEvalQualifier,
        TemplateEntry::new(
            "On {quantifier} {subwindows} {scope} when {conditions}, {clauses}.",
            "{your} {attribute} was {summarizer}",
        )
        .condition("{your} {attribute} was {summarizer}"),
    );
    ind.insert(
        GoalEvaluation,
        TemplateEntry::new(
            "On {quantifier} {subwindows} {scope}, {clauses}.",
            "you {summarizer} {your} goal to keep {your} {attribute} {goal}",
        ),
    );
    ind.insert(
        GoalAssistance,
        TemplateEntry::new(
            "In order to better follow the {guideline}, you should {clauses}.",
            "{summarizer} {your} {attribute}",
        ),
    );
    ind.insert(
        DayBasedPattern,
        TemplateEntry::new(
            "{clauses} on {weekdays}.",
            "{your} {attribute} tends to be {summarizer}",
        ),
    );
    ind.insert(
        GeneralIfThen,
        TemplateEntry::new(
            "In general, if {conditions}, then {clauses}.",
            "{your} {attribute} is {summarizer}",
        )
        .condition("{your} {attribute} is {summarizer}"),
    );
    ind.insert(
        StandardTrend,
        TemplateEntry::new(
            "{quantifier} time, {clauses} from one {subwindow} to the next.",
            "{your} {attribute} {summarizer}",
        )
        .phrases(&trend_phrases),
    );
    ind.insert(
        IfThenPattern,
        TemplateEntry::new(
            "There is {confidence} confidence that, when {conditions}, {clauses} {horizon}.",
            "{your} {attribute} tends to be {sequence}",
        )
        .condition("{your} {attribute} follows the pattern of being {sequence}"),
    );
    ind.insert(
        DayIfThenPattern,
        TemplateEntry::new(
            "There is {confidence} confidence that, when {conditions}, {clauses}.",
            "{your} {attribute} tends to be {sequence}",
        )
        .condition("{your} {attribute} follows the pattern of being {sequence}")
        .steps("{summarizer} on a {weekday}", "{summarizer} the next {weekday}"),
    );
    ind.insert(
        Comparison,
        TemplateEntry::new(
            "{clauses} in {window} {number} {than} {then} in {window} {other_number}.",
            "{your} {attribute} was {summarizer}",
        ),
    );
    ind.insert(
        GoalComparison,
        TemplateEntry::new(
            "{clauses} in {window} {number} {than} you did in {window} {other_number}.",
            "you did {summarizer} overall with keeping {your} {attribute} {goal}",
        ),
    );
    ind.insert(
        ClusterBasedPattern,
        TemplateEntry::new(
            "{description} During {quantifier} {windows} similar to {window} {number}, {clauses} the next {window}.",
            "{your} {attribute} {summarizer}",
        )
        .describe(
            "In {window} {number}, {description_clauses}.",
            "{your} {attribute} was {sequence}",
        ),
    );
    ind.insert(
        StandardPattern,
        TemplateEntry::new(
            "The last time you had a {window} similar to {window} {number}, {clauses} the next {window}.",
            "{your} {attribute} {summarizer}",
        ),
    );

    let cluster_phrases = [
        ("rose", "a rise"),
        ("dropped", "a drop"),
        ("stayed the same", "little to no change"),
    ];
    let mut grp = BTreeMap::new();
    let had = "a {summarizer} {attribute}";
    grp.insert(
        StandardEvalTW,
        TemplateEntry::new(
            "{quantifier} participants in this study had {clauses} in the past full {window}.",
            had,
        ),
    );
    grp.insert(
        StandardEvalSTW,
        TemplateEntry::new(
            "{quantifier} participants in this study had {clauses} on {inner_quantifier} {subwindows} {scope}.",
            had,
        ),
    );
    grp.insert(
        StandardEvalQualifier,
        TemplateEntry::new(
            "{quantifier} participants in this study had {clauses}, when they had {conditions} on {inner_quantifier} {subwindows} {scope}.",
            had,
        )
        .condition(had),
    );
    grp.insert(
        GoalEvaluation,
        TemplateEntry::new(
            "{quantifier} participants in this study {clauses} on {inner_quantifier} {subwindows} {scope}.",
            "{summarizer} {your} goal to keep {your} {attribute} {goal}",
        ),
    );
    grp.insert(
        GoalAssistance,
        TemplateEntry::new(
            "{quantifier} participants in this study have been given advice to {clauses}.",
            "{summarizer} {your} {attribute}",
        ),
    );
    grp.insert(
        DayBasedPattern,
        TemplateEntry::new(
            "{quantifier} participants in this study tend to have {clauses} on {weekdays}.",
            had,
        ),
    );
    grp.insert(
        GeneralIfThen,
        TemplateEntry::new(
            "For {quantifier} participants in this study, it is true that when they had {conditions}, they had {clauses}.",
            had,
        )
        .condition(had),
    );
    grp.insert(
        StandardTrend,
        TemplateEntry::new(
            "{quantifier} participants in this study {clauses} from one {subwindow} to the next {inner_quantifier} time.",
            "{summarizer} {your} {attribute}",
        )
        .phrases(&[
            ("increased", "increase"),
            ("decreased", "decrease"),
            ("stayed the same", "maintain"),
        ]),
    );
    grp.insert(
        IfThenPattern,
        TemplateEntry::new(
            "For {quantifier} participants in this study, it is true that when {conditions}, {clauses} {horizon}.",
            "{your} {attribute} tends to be {sequence}",
        )
        .condition("{your} {attribute} follows the pattern of being {sequence}"),
    );
    grp.insert(
        DayIfThenPattern,
        TemplateEntry::new(
            "For {quantifier} participants in this study, it is true that when {conditions}, {clauses}.",
            "{your} {attribute} tends to be {sequence}",
        )
        .condition("{your} {attribute} follows the pattern of being {sequence}")
        .steps("{summarizer} on a {weekday}", "{summarizer} on a {weekday}"),
    );
    grp.insert(
        Comparison,
        TemplateEntry::new(
            "{quantifier} participants in this study had {clauses} in {your} past full {window} {than} they did in an earlier {window}.",
            had,
        )
        .phrases(&[("about the same", "similar")]),
    );
    grp.insert(
        GoalComparison,
        TemplateEntry::new(
            "{quantifier} participants in this study {clauses} in {your} past full {window} {than} they did in an earlier {window}.",
            "did {summarizer} with keeping {your} {attribute} {goal}",
        ),
    );
    grp.insert(
        ClusterBasedPattern,
        TemplateEntry::new(
            "After looking at clusters containing {windows} similar to this past one, it can be seen that {quantifier} participants with these clusters may see {clauses} next {window}.",
            "{summarizer} in {your} {attribute}",
        )
        .phrases(&cluster_phrases),
    );
    grp.insert(
        StandardPattern,
        TemplateEntry::new(
            "Based on the most recent {windows} similar to this past one, it can be seen that {quantifier} participants may see {clauses} next {window}.",
            "{summarizer} in {your} {attribute}",
        )
        .phrases(&cluster_phrases),
    );

    TemplateRegistry {
        possessive: "your".into(),
        group_possessive: "their".into(),
        individual: ind,
        group: grp,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn joining() {
        let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
        assert_eq!(join_clauses(&s(&["a"])), "a");
        assert_eq!(join_clauses(&s(&["a", "b"])), "a and b");
        assert_eq!(join_clauses(&s(&["a", "b", "c"])), "a, b, and c");
        assert_eq!(capitalize("your x"), "Your x");
    }

    #[test]
    fn filling() {
        assert_eq!(
            fill("{your} {attribute}", &[("your", "your"), ("attribute", "heart rate")]).unwrap(),
            "your heart rate"
        );
        assert_eq!(
            fill("{bogus}", &[]),
            Err(TemplateError::UnknownPlaceholder("bogus".into()))
        );
        assert_eq!(
            fill("{your}", &[]),
            Err(TemplateError::MissingValue("your".into()))
        );
        assert!(matches!(fill("{your", &[]), Err(TemplateError::Unclosed(_))));
    }

    #[test]
    fn default_registry_is_complete_and_round_trips() {
        let r = TemplateRegistry::default();
        r.validate().unwrap();
        assert_eq!(TemplateRegistry::from_json(&r.to_json()).unwrap(), r);
        let stock = TemplateRegistry::with_possessive("the");
        assert_eq!(stock.possessive, "the");
    }
}
