//! Squeezer clustering of window tuples, contiguous frequent-pattern mining
//! and if-then rules.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::discretize::SymbolicSeries;
use crate::model::Letter;

#[derive(Debug, Error, PartialEq)]
pub enum MiningError {
    #[error("tuples have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least 2 tuples, got {0}")]
    TooFewTuples(usize),
    #[error("sample fraction {0} is outside (0, 1]")]
    InvalidFraction(f64),
}

/// The sub-window symbols of one window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WindowTuple<E> {
    pub window_index: usize,
    pub symbols: Vec<E>,
}

impl<E> WindowTuple<E> {
    pub fn new(window_index: usize, symbols: Vec<E>) -> Self {
        Self {
            window_index,
            symbols,
        }
    }
}

/// Number of positions with equal symbols.
pub fn similarity<E: PartialEq>(a: &[E], b: &[E]) -> Result<usize, MiningError> {
    if a.len() != b.len() {
        return Err(MiningError::LengthMismatch(a.len(), b.len()));
    }
    Ok(a.iter().zip(b).filter(|(x, y)| x == y).count())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThresholdEstimate {
    /// Mean of the per-repeat average pairwise similarities.
    pub average: f64,
    /// average + 1
    pub threshold: f64,
    pub repeats: usize,
    pub sample_size: usize,
}

/// Number of sampling repeats for fraction `f`: ceil(1/f), tolerant of
/// rounding in 1/f.
pub fn sampling_repeats(f: f64) -> usize {
    let inv = 1.0 / f;
    let nearest = inv.round();
    if (inv - nearest).abs() < 1e-9 {
        nearest as usize
    } else {
        inv.ceil() as usize
    }
}

/// Estimates the Squeezer threshold from seeded random samples of the tuples.
pub fn estimate_threshold<E: PartialEq>(
    tuples: &[WindowTuple<E>],
    f: f64,
    seed: u64,
) -> Result<ThresholdEstimate, MiningError> {
    if !(f > 0.0 && f <= 1.0) {
        return Err(MiningError::InvalidFraction(f));
    }
    let n = tuples.len();
    if n < 2 {
        return Err(MiningError::TooFewTuples(n));
    }
    let repeats = sampling_repeats(f);
    let sample_size = ((f * n as f64).ceil() as usize).clamp(2, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut total = 0.0;
    for _ in 0..repeats {
        let mut idx = sample(&mut rng, n, sample_size).into_vec();
        idx.sort_unstable();
        let mut sum = 0usize;
        let mut pairs = 0usize;
        for (k, &i) in idx.iter().enumerate() {
            for &j in &idx[k + 1..] {
                sum += similarity(&tuples[i].symbols, &tuples[j].symbols)?;
                pairs += 1;
            }
        }
        total += sum as f64 / pairs as f64;
    }
    let average = total / repeats as f64;
    Ok(ThresholdEstimate {
        average,
        threshold: average + 1.0,
        repeats,
        sample_size,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cluster {
    /// Window indices, ascending.
    pub members: Vec<usize>,
    pub threshold: f64,
}

impl Cluster {
    pub fn contains(&self, window: usize) -> bool {
        self.members.binary_search(&window).is_ok()
    }
}

/// One pass over the tuples in the given order. A tuple joins the cluster
/// with the highest mean similarity to its members when that mean reaches
/// `s`; otherwise it starts a new cluster. Ties go to the older cluster.
pub fn squeezer<E: PartialEq>(tuples: &[WindowTuple<E>], s: f64) -> Vec<Cluster> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (t, tuple) in tuples.iter().enumerate() {
        let mut best: Option<(usize, f64)> = None;
        for (c, members) in clusters.iter().enumerate() {
            let sum: usize = members
                .iter()
                .map(|&m| similarity(&tuple.symbols, &tuples[m].symbols).unwrap_or(0))
                .sum();
            let mean = sum as f64 / members.len() as f64;
            if best.is_none_or(|(_, b)| mean > b) {
                best = Some((c, mean));
            }
        }
        match best {
            Some((c, mean)) if mean >= s => clusters[c].push(t),
            _ => clusters.push(vec![t]),
        }
    }
    clusters
        .into_iter()
        .map(|members| {
            let mut members: Vec<usize> = members
                .into_iter()
                .map(|i| tuples[i].window_index)
                .collect();
            members.sort_unstable();
            Cluster {
                members,
                threshold: s,
            }
        })
        .collect()
}

/// Letter pairs (window w, window w+1) for every cluster member that has a
/// successor window in the series.
pub fn pair_with_followers(cluster: &Cluster, tw_symbols: &SymbolicSeries) -> Vec<(Letter, Letter)> {
    let letters: BTreeMap<usize, Letter> = tw_symbols
        .symbols
        .iter()
        .map(|s| (s.index, s.letter))
        .collect();
    follower_pairs(&cluster.members, &letters)
        .into_iter()
        .map(|(_, a, b)| (a, b))
        .collect()
}

/// Generic form of [`pair_with_followers`]: returns (window, value at w, value at w+1).
pub fn follower_pairs<T: Clone>(members: &[usize], by_window: &BTreeMap<usize, T>) -> Vec<(usize, T, T)> {
    members
        .iter()
        .filter_map(|&w| {
            let now = by_window.get(&w)?;
            let next = by_window.get(&(w + 1))?;
            Some((w, now.clone(), next.clone()))
        })
        .collect()
}

/// Counts of every contiguous subsequence up to `max_len`, plus the subset
/// reaching the support threshold.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequentPatterns<E: Ord> {
    pub patterns: BTreeMap<Vec<E>, usize>,
    counts: BTreeMap<Vec<E>, usize>,
    /// positions[len] = number of admissible start positions for that length
    positions: Vec<usize>,
    pub max_len: usize,
    pub min_support: f64,
}

impl<E: Ord> FrequentPatterns<E> {
    pub fn count(&self, pattern: &[E]) -> usize {
        self.counts.get(pattern).copied().unwrap_or(0)
    }

    pub fn positions(&self, len: usize) -> usize {
        self.positions.get(len).copied().unwrap_or(0)
    }

    pub fn support(&self, pattern: &[E]) -> f64 {
        let pos = self.positions(pattern.len());
        if pos == 0 {
            0.0
        } else {
            self.count(pattern) as f64 / pos as f64
        }
    }
}

/// Frequent contiguous patterns of one sequence.
pub fn mine_frequent<E: Ord + Clone>(
    sequence: &[E],
    max_len: usize,
    min_support: f64,
) -> FrequentPatterns<E> {
    mine_frequent_segments(std::slice::from_ref(&sequence.to_vec()), max_len, min_support)
}

/// Frequent contiguous patterns over several independent segments; no
/// pattern spans two segments.
pub fn mine_frequent_segments<E: Ord + Clone>(
    segments: &[Vec<E>],
    max_len: usize,
    min_support: f64,
) -> FrequentPatterns<E> {
    let mut counts: BTreeMap<Vec<E>, usize> = BTreeMap::new();
    let mut positions = vec![0usize; max_len + 1];
    for seg in segments {
        for len in 1..=max_len.min(seg.len()) {
            positions[len] += seg.len() - len + 1;
            for w in seg.windows(len) {
                *counts.entry(w.to_vec()).or_insert(0) += 1;
            }
        }
    }
    let patterns = counts
        .iter()
        .filter(|(p, &c)| c as f64 / positions[p.len()] as f64 >= min_support)
        .map(|(p, &c)| (p.clone(), c))
        .collect();
    FrequentPatterns {
        patterns,
        counts,
        positions,
        max_len,
        min_support,
    }
}

/// A mined rule: when `prefix` occurs, `suffix` follows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SequenceRule<E> {
    pub prefix: Vec<E>,
    pub suffix: Vec<E>,
    /// Occurrences of prefix followed by suffix.
    pub support_count: usize,
    pub prefix_count: usize,
    pub confidence: f64,
    /// support_count over the admissible start positions for the full length.
    pub support: f64,
    /// Admissible start positions used for `support`.
    pub support_positions: usize,
    pub day_annotated: bool,
    /// When set, prefix events only carry this attribute's letter.
    pub prefix_attribute: Option<usize>,
}

impl<E: Ord> SequenceRule<E> {
    /// Confidence desc, support desc, then prefix and suffix ascending.
    pub fn ranking(&self, other: &Self) -> Ordering {
        let conf = (other.support_count as u128 * self.prefix_count as u128)
            .cmp(&(self.support_count as u128 * other.prefix_count as u128));
        let sup = (other.support_count as u128 * self.support_positions as u128)
            .cmp(&(self.support_count as u128 * other.support_positions as u128));
        conf.then(sup)
            .then_with(|| self.prefix.cmp(&other.prefix))
            .then_with(|| self.suffix.cmp(&other.suffix))
    }
}

/// Splits every frequent pattern of length >= 2 into prefix and suffix and
/// keeps rules whose confidence reaches `min_confidence`.
pub fn rules_from_patterns<E: Ord + Clone>(
    patterns: &FrequentPatterns<E>,
    min_confidence: f64,
) -> Vec<SequenceRule<E>> {
    let mut rules = Vec::new();
    for (p, &count) in &patterns.patterns {
        for split in 1..p.len() {
            let prefix_count = patterns.count(&p[..split]);
            let confidence = count as f64 / prefix_count as f64;
            if confidence >= min_confidence {
                let pos = patterns.positions(p.len());
                rules.push(SequenceRule {
                    prefix: p[..split].to_vec(),
                    suffix: p[split..].to_vec(),
                    support_count: count,
                    prefix_count,
                    confidence,
                    support: count as f64 / pos as f64,
                    support_positions: pos,
                    day_annotated: false,
                    prefix_attribute: None,
                });
            }
        }
    }
    rules.sort_by(|a, b| a.ranking(b));
    rules
}

/// One logged day in a (possibly multivariate) symbolic sequence.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Event {
    /// Monday = 0; only set in day-annotated mining.
    pub weekday: Option<u8>,
    pub letters: Vec<Letter>,
}

impl Event {
    pub fn new(letters: Vec<Letter>) -> Self {
        Self {
            weekday: None,
            letters,
        }
    }

    fn project(&self, attr: Option<usize>) -> Event {
        match attr {
            Some(k) => Event {
                weekday: self.weekday,
                letters: vec![self.letters[k]],
            },
            None => self.clone(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleQuery {
    pub max_len: usize,
    pub min_support: f64,
    pub min_confidence: f64,
    /// Restrict prefixes to this attribute's letters; `None` uses full events.
    pub prefix_attribute: Option<usize>,
    /// Support is measured among start positions on the same weekday as the
    /// pattern's first event.
    pub day_annotated: bool,
}

/// If-then rules over event segments. Suffixes are always full events.
pub fn mine_event_rules(segments: &[Vec<Event>], q: &RuleQuery) -> Vec<SequenceRule<Event>> {
    let attr = q.prefix_attribute;
    // denominators keyed by (length, weekday of first event)
    let mut positions: BTreeMap<(usize, Option<u8>), usize> = BTreeMap::new();
    let mut prefix_counts: BTreeMap<Vec<Event>, usize> = BTreeMap::new();
    let mut rule_counts: BTreeMap<(Vec<Event>, Vec<Event>), usize> = BTreeMap::new();
    for seg in segments {
        let projected: Vec<Event> = seg.iter().map(|e| e.project(attr)).collect();
        let n = seg.len();
        for i in 0..n {
            let day = if q.day_annotated { seg[i].weekday } else { None };
            for len in 1..=q.max_len.min(n - i) {
                *positions.entry((len, day)).or_insert(0) += 1;
                if len < q.max_len {
                    *prefix_counts
                        .entry(projected[i..i + len].to_vec())
                        .or_insert(0) += 1;
                }
                for split in 1..len {
                    let key = (
                        projected[i..i + split].to_vec(),
                        seg[i + split..i + len].to_vec(),
                    );
                    *rule_counts.entry(key).or_insert(0) += 1;
                }
            }
        }
    }
    let mut rules = Vec::new();
    for ((prefix, suffix), count) in rule_counts {
        let len = prefix.len() + suffix.len();
        let day = if q.day_annotated {
            prefix[0].weekday
        } else {
            None
        };
        let pos = positions[&(len, day)];
        let support = count as f64 / pos as f64;
        let prefix_count = prefix_counts[&prefix];
        let confidence = count as f64 / prefix_count as f64;
        if support >= q.min_support && confidence >= q.min_confidence {
            rules.push(SequenceRule {
                prefix,
                suffix,
                support_count: count,
                prefix_count,
                confidence,
                support,
                support_positions: pos,
                day_annotated: q.day_annotated,
                prefix_attribute: attr,
            });
        }
    }
    rules.sort_by(|a, b| a.ranking(b));
    rules
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn chars(s: &str) -> Vec<char> {
        s.chars().collect()
    }

    #[test]
    fn similarity_examples() {
        assert_eq!(similarity(&chars("abc"), &chars("abd")).unwrap(), 2);
        assert_eq!(similarity(&chars("abcabca"), &chars("abcabca")).unwrap(), 7);
        assert_eq!(similarity(&chars("aaaaaaa"), &chars("bbbbbbb")).unwrap(), 0);
        assert_eq!(
            similarity(&chars("ab"), &chars("abc")),
            Err(MiningError::LengthMismatch(2, 3))
        );
    }

    #[test]
    fn threshold_examples() {
        let same: Vec<_> = (0..10).map(|i| WindowTuple::new(i, chars("abcabca"))).collect();
        let t = estimate_threshold(&same, 0.2, 42).unwrap();
        assert_eq!((t.average, t.threshold, t.repeats), (7.0, 8.0, 5));
        let two = vec![
            WindowTuple::new(0, chars("aaaaaaa")),
            WindowTuple::new(1, chars("bbbbbbb")),
        ];
        let t = estimate_threshold(&two, 0.2, 1).unwrap();
        assert_eq!((t.average, t.threshold), (0.0, 1.0));
        assert!(matches!(
            estimate_threshold(&two[..1], 0.2, 1),
            Err(MiningError::TooFewTuples(1))
        ));
        assert_eq!(sampling_repeats(0.2), 5);
        assert_eq!(sampling_repeats(0.3), 4);
        assert_eq!(sampling_repeats(1.0), 1);
        assert_eq!(sampling_repeats(0.1), 10);
    }

    #[test]
    fn threshold_is_seed_deterministic() {
        let tuples: Vec<_> = (0..30)
            .map(|i| WindowTuple::new(i, vec![i % 3, i % 5, i % 2, (i / 3) % 3]))
            .collect();
        let a = estimate_threshold(&tuples, 0.2, 7).unwrap();
        let b = estimate_threshold(&tuples, 0.2, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn squeezer_examples() {
        let one = vec![WindowTuple::new(0, chars("abc"))];
        assert_eq!(squeezer(&one, 2.0).len(), 1);
        let t = vec![
            WindowTuple::new(0, chars("aaaaaaa")),
            WindowTuple::new(1, chars("aaaaaaa")),
            WindowTuple::new(2, chars("bbbbbbb")),
        ];
        let c = squeezer(&t, 4.0);
        let members: Vec<_> = c.iter().map(|c| c.members.clone()).collect();
        assert_eq!(members, vec![vec![0, 1], vec![2]]);
        let two = vec![
            WindowTuple::new(3, chars("abc")),
            WindowTuple::new(4, chars("abc")),
        ];
        assert_eq!(squeezer(&two, 3.0)[0].members, vec![3, 4]);
    }

    #[test]
    fn follower_pairs_examples() {
        let letters: BTreeMap<usize, char> =
            [(3, 'c'), (4, 'b'), (10, 'c'), (11, 'c')].into_iter().collect();
        let pairs: Vec<_> = follower_pairs(&[3, 10], &letters)
            .into_iter()
            .map(|(_, a, b)| (a, b))
            .collect();
        assert_eq!(pairs, vec![('c', 'b'), ('c', 'c')]);
        assert!(follower_pairs(&[11], &letters).is_empty());
    }

    #[test]
    fn mining_examples() {
        let fp = mine_frequent(&chars("aaaa"), 2, 0.5);
        let got: Vec<_> = fp.patterns.iter().map(|(p, c)| (p.iter().collect::<String>(), *c)).collect();
        assert_eq!(got, vec![("a".to_string(), 4), ("aa".to_string(), 3)]);
        let rules = rules_from_patterns(&fp, 0.0);
        assert_eq!(rules.len(), 1);
        assert_eq!(rules[0].confidence, 0.75);

        let fp = mine_frequent(&chars("abab"), 4, 0.6);
        let got: Vec<_> = fp.patterns.iter().map(|(p, c)| (p.iter().collect::<String>(), *c)).collect();
        // one length-4 position, so "abab" itself is frequent
        assert_eq!(got, vec![("ab".to_string(), 2), ("abab".to_string(), 1)]);
        // the prefix "a" is infrequent but its count is still known
        let rules = rules_from_patterns(&fp, 0.0);
        let ab = rules.iter().find(|r| r.prefix == vec!['a'] && r.suffix == vec!['b']).unwrap();
        assert_eq!(ab.prefix_count, 2);
        assert_eq!(ab.confidence, 1.0);

        let fp = mine_frequent(&chars("abca"), 4, 0.0);
        let rules = rules_from_patterns(&fp, 0.0);
        let splits: Vec<_> = rules
            .iter()
            .filter(|r| r.prefix.len() + r.suffix.len() == 4)
            .map(|r| (r.prefix.iter().collect::<String>(), r.suffix.iter().collect::<String>()))
            .collect();
        assert_eq!(splits.len(), 3);
        for want in [("a", "bca"), ("ab", "ca"), ("abc", "a")] {
            assert!(splits.contains(&(want.0.to_string(), want.1.to_string())));
        }
    }

    #[test]
    fn segments_do_not_join() {
        let fp = mine_frequent_segments(&[chars("ab"), chars("ab")], 2, 0.0);
        assert_eq!(fp.count(&chars("ba")), 0);
        assert_eq!(fp.count(&chars("ab")), 2);
        assert_eq!(fp.positions(2), 2);
    }

    fn ev(s: &str) -> Vec<Event> {
        s.split(' ')
            .map(|t| Event::new(t.bytes().map(|b| Letter(b - b'a')).collect()))
            .collect()
    }

    #[test]
    fn projected_prefix_rules() {
        // attribute 0 'c' is always followed by joint (a, a)
        let seq = ev("ca aa cb aa cc aa ba bb");
        let q = RuleQuery {
            max_len: 2,
            min_support: 0.0,
            min_confidence: 1.0,
            prefix_attribute: Some(0),
            day_annotated: false,
        };
        let rules = mine_event_rules(&[seq], &q);
        let hit = rules
            .iter()
            .find(|r| r.prefix == vec![Event::new(vec![Letter(2)])])
            .expect("c -> aa rule");
        assert_eq!(hit.suffix, ev("aa"));
        assert_eq!((hit.support_count, hit.prefix_count), (3, 3));
    }

    #[test]
    fn day_annotated_support_uses_weekday_positions() {
        let mut seq = Vec::new();
        for i in 0..28u8 {
            let letter = if i % 7 == 5 || i % 7 == 6 { 4 } else { i % 3 };
            seq.push(Event {
                weekday: Some(i % 7),
                letters: vec![Letter(letter)],
            });
        }
        let q = RuleQuery {
            max_len: 2,
            min_support: 0.5,
            min_confidence: 1.0,
            prefix_attribute: None,
            day_annotated: true,
        };
        let rules = mine_event_rules(&[seq], &q);
        let sat = rules
            .iter()
            .find(|r| r.prefix[0].weekday == Some(5))
            .expect("saturday rule");
        assert_eq!(sat.suffix[0].weekday, Some(6));
        assert_eq!(sat.support_count, 4);
        assert_eq!(sat.support_positions, 4);
        assert_eq!(sat.support, 1.0);
    }

    proptest! {
        #[test]
        fn full_prefix_event_rules_match_pattern_rules(
            raw in prop::collection::vec((0u8..3, 0u8..2), 1..40),
            minsup in 0.0f64..0.6,
            minconf in 0.0f64..1.0,
        ) {
            let seq: Vec<Event> = raw.iter().map(|&(a, b)| Event::new(vec![Letter(a), Letter(b)])).collect();
            let fp = mine_frequent(&seq, 4, minsup);
            let a = rules_from_patterns(&fp, minconf);
            let q = RuleQuery { max_len: 4, min_support: minsup, min_confidence: minconf, prefix_attribute: None, day_annotated: false };
            let b = mine_event_rules(&[seq], &q);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn rule_counts_are_consistent(raw in prop::collection::vec(0u8..3, 1..40)) {
            let fp = mine_frequent(&raw, 5, 0.0);
            for r in rules_from_patterns(&fp, 0.0) {
                prop_assert!(r.support_count <= r.prefix_count);
                prop_assert!(r.confidence > 0.0 && r.confidence <= 1.0);
                prop_assert!(r.prefix.len() + r.suffix.len() <= 5);
            }
        }
    }
}
