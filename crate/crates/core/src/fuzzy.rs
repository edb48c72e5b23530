//! Fuzzy quantifiers, agreement ratios and quantifier/summarizer selection.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FuzzyError {
    #[error("ratio {0} is outside [0, 1]")]
    OutOfRange(f64),
    #[error("empty query subset")]
    EmptyQuery,
    #[error("quantifier `{0}`: {1}")]
    InvalidQuantifier(String, String),
}

/// A quantifier defined by a piecewise-linear membership function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Quantifier {
    pub name: String,
    /// (r, mu) vertices with nondecreasing r. Membership is 0 outside the span.
    pub vertices: Vec<(f64, f64)>,
    /// Larger means the quantifier implies a larger amount.
    pub rank: usize,
}

impl Quantifier {
    pub fn new(name: &str, vertices: &[(f64, f64)], rank: usize) -> Self {
        Self {
            name: name.to_string(),
            vertices: vertices.to_vec(),
            rank,
        }
    }

    pub fn validate(&self) -> Result<(), FuzzyError> {
        let bad = |m: &str| Err(FuzzyError::InvalidQuantifier(self.name.clone(), m.into()));
        if self.vertices.is_empty() {
            return bad("no vertices");
        }
        if self
            .vertices
            .iter()
            .any(|&(r, m)| !(0.0..=1.0).contains(&r) || !(0.0..=1.0).contains(&m))
        {
            return bad("vertex outside the unit square");
        }
        if self.vertices.windows(2).any(|w| w[0].0 > w[1].0) {
            return bad("vertex r-coordinates must be nondecreasing");
        }
        Ok(())
    }

    /// Membership degree at `r`, which must lie in [0, 1].
    pub fn membership(&self, r: f64) -> Result<f64, FuzzyError> {
        if !(0.0..=1.0).contains(&r) {
            return Err(FuzzyError::OutOfRange(r));
        }
        Ok(self.eval(r))
    }

    fn eval(&self, r: f64) -> f64 {
        let v = &self.vertices;
        // exact vertex hit: take the largest value listed at that r
        let at: Vec<f64> = v.iter().filter(|p| p.0 == r).map(|p| p.1).collect();
        if !at.is_empty() {
            return at.into_iter().fold(0.0, f64::max);
        }
        for w in v.windows(2) {
            let ((x0, y0), (x1, y1)) = (w[0], w[1]);
            if x0 < r && r < x1 {
                return y0 + (y1 - y0) * (r - x0) / (x1 - x0);
            }
        }
        0.0
    }
}

pub fn membership(q: &Quantifier, r: f64) -> Result<f64, FuzzyError> {
    q.membership(r)
}

/// The seven default quantifiers, in increasing implied amount.
pub fn default_quantifiers() -> Vec<Quantifier> {
    vec![
        Quantifier::new("none of the", &[(0.0, 1.0), (0.01, 0.0)], 0),
        Quantifier::new(
            "almost none of the",
            &[(0.0, 0.0), (0.01, 1.0), (0.2, 1.0), (0.3, 0.0)],
            1,
        ),
        Quantifier::new(
            "some of the",
            &[(0.1, 0.0), (0.3, 1.0), (0.4, 1.0), (0.5, 0.0)],
            2,
        ),
        Quantifier::new("half of the", &[(0.4, 0.0), (0.5, 1.0), (0.6, 0.0)], 3),
        Quantifier::new(
            "more than half of the",
            &[(0.5, 0.0), (0.6, 1.0), (0.75, 1.0), (1.0, 0.0)],
            4,
        ),
        most_of_the(),
        Quantifier::new("all of the", &[(0.99, 0.0), (1.0, 1.0)], 6),
    ]
}

/// 4r-2 on (0.5, 0.75), 1 on [0.75, 0.9], 10-10r on (0.9, 1).
pub fn most_of_the() -> Quantifier {
    Quantifier::new(
        "most of the",
        &[(0.5, 0.0), (0.75, 1.0), (0.9, 1.0), (1.0, 0.0)],
        5,
    )
}

/// Variant whose plateau runs to 0.99, as drawn in the membership figure.
pub fn most_of_the_plateau_variant() -> Quantifier {
    Quantifier::new(
        "most of the",
        &[(0.5, 0.0), (0.75, 1.0), (0.99, 1.0), (1.0, 0.0)],
        5,
    )
}

/// Fraction of values satisfying a crisp summarizer.
pub fn agreement_ratio<T>(values: &[T], summarizer: impl Fn(&T) -> bool) -> Result<f64, FuzzyError> {
    if values.is_empty() {
        return Err(FuzzyError::EmptyQuery);
    }
    let hits = values.iter().filter(|v| summarizer(v)).count();
    Ok(hits as f64 / values.len() as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidatePair {
    pub summarizer: String,
    /// Position of the summarizer in the candidate list.
    pub summarizer_index: usize,
    pub quantifier: String,
    pub quantifier_rank: usize,
    pub ratio: f64,
    pub truth: f64,
}

/// Best quantifier for one ratio; ties go to the larger implied amount.
pub fn best_quantifier(quantifiers: &[Quantifier], r: f64) -> Option<(&Quantifier, f64)> {
    let r = r.clamp(0.0, 1.0);
    let mut best: Option<(&Quantifier, f64)> = None;
    for q in quantifiers {
        let mu = q.eval(r);
        best = match best {
            Some((bq, bmu)) if bmu > mu || (bmu == mu && bq.rank >= q.rank) => Some((bq, bmu)),
            _ => Some((q, mu)),
        };
    }
    best
}

/// Picks the winning (summarizer, quantifier) pair. Candidates are given in
/// summarizer-set order, which breaks the final ties.
/// Rank of "some of the". Pairs whose quantifier sits below it only win
/// when no summarizer is best described by a positive amount; otherwise any
/// label seen on a single day would win with "almost none of the".
pub const POSITIVE_RANK: usize = 2;

pub fn best_pair(candidates: &[(String, f64)], quantifiers: &[Quantifier]) -> Option<CandidatePair> {
    let mut best: Option<CandidatePair> = None;
    for (i, (label, r)) in candidates.iter().enumerate() {
        let Some((q, mu)) = best_quantifier(quantifiers, *r) else {
            continue;
        };
        let better = match &best {
            None => true,
            Some(b) => {
                let (pos, bpos) = (q.rank >= POSITIVE_RANK, b.quantifier_rank >= POSITIVE_RANK);
                (pos && !bpos)
                    || (pos == bpos && (mu > b.truth || (mu == b.truth && q.rank > b.quantifier_rank)))
            }
        };
        if better {
            best = Some(CandidatePair {
                summarizer: label.clone(),
                summarizer_index: i,
                quantifier: q.name.clone(),
                quantifier_rank: q.rank,
                ratio: *r,
                truth: mu,
            });
        }
    }
    if let Some(b) = &best {
        if log::log_enabled!(log::Level::Debug) {
            log_runner_ups(b, candidates, quantifiers);
        }
    }
    best
}

fn log_runner_ups(winner: &CandidatePair, candidates: &[(String, f64)], quantifiers: &[Quantifier]) {
    let r = winner.ratio.clamp(0.0, 1.0);
    for q in quantifiers.iter().filter(|q| q.name != winner.quantifier) {
        let mu = q.eval(r);
        if mu > 0.0 {
            log::debug!("runner-up: {} {} ({mu:.3})", q.name, winner.summarizer);
        }
    }
    for (i, (label, r)) in candidates.iter().enumerate() {
        if i == winner.summarizer_index {
            continue;
        }
        if let Some((q, mu)) = best_quantifier(quantifiers, *r) {
            log::debug!("runner-up: {} {label} ({mu:.3})", q.name);
        }
    }
}
