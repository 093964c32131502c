use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};

use super::tokenize;

/// Multiset of n-grams.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NgramBag<'a> {
    n: usize,
    counts: HashMap<&'a [String], usize>,
    total: usize,
}

impl<'a> NgramBag<'a> {
    pub fn new(tokens: &'a [String], n: usize) -> Self {
        assert!(n >= 1, "n-gram order must be at least 1");
        let mut counts = HashMap::new();
        let mut total = 0;
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
            total += 1;
        }
        NgramBag { n, counts, total }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of n-gram occurrences (with multiplicity).
    pub fn total(&self) -> usize {
        self.total
    }

    pub fn count(&self, gram: &[String]) -> usize {
        self.counts.get(gram).copied().unwrap_or(0)
    }

    pub fn distinct(&self) -> impl Iterator<Item = &'a [String]> + '_ {
        self.counts.keys().copied()
    }

    /// Clipped multiset intersection: sum over grams of `min(self, other)`.
    pub fn shared(&self, other: &NgramBag<'_>) -> usize {
        let (small, large) = if self.counts.len() <= other.counts.len() {
            (self, other)
        } else {
            (other, self)
        };
        small
            .counts
            .iter()
            .map(|(gram, &c)| c.min(large.count(gram)))
            .sum()
    }
}

/// What a recall value is normalized by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecallDenominator {
    /// Number of n-grams in the target.
    TargetNgrams,
    /// Number of tokens in the target.
    TargetTokens,
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

pub fn ngram_recall_tokens(
    source: &[String],
    target: &[String],
    n: usize,
    denominator: RecallDenominator,
) -> Option<f64> {
    let source_bag = NgramBag::new(source, n);
    let target_bag = NgramBag::new(target, n);
    let den = match denominator {
        RecallDenominator::TargetNgrams => target_bag.total(),
        RecallDenominator::TargetTokens => target.len(),
    };
    ratio(source_bag.shared(&target_bag), den)
}

/// Clipped count of target n-grams also found in `source`, divided by the
/// chosen target size. Returns 0 when that size is 0.
pub fn ngram_recall(source: &str, target: &str, n: usize, denominator: RecallDenominator) -> f64 {
    ngram_recall_tokens(&tokenize(source), &tokenize(target), n, denominator).unwrap_or(0.0)
}

pub fn ngram_precision_tokens(source: &[String], target: &[String], n: usize) -> Option<f64> {
    let source_bag = NgramBag::new(source, n);
    let target_bag = NgramBag::new(target, n);
    ratio(source_bag.shared(&target_bag), source_bag.total())
}

/// Clipped shared n-gram count divided by the number of source n-grams.
pub fn ngram_precision(source: &str, target: &str, n: usize) -> f64 {
    ngram_precision_tokens(&tokenize(source), &tokenize(target), n).unwrap_or(0.0)
}

fn gram_set(tokens: &[String], n: usize) -> HashSet<&[String]> {
    tokens.windows(n).collect()
}

pub fn jaccard_tokens(a: &[String], b: &[String]) -> Option<f64> {
    let a = gram_set(a, 1);
    let b = gram_set(b, 1);
    let union = a.union(&b).count();
    ratio(a.intersection(&b).count(), union)
}

/// Jaccard similarity of the unigram sets; 0 when both are empty.
pub fn jaccard_unigram(a: &str, b: &str) -> f64 {
    jaccard_tokens(&tokenize(a), &tokenize(b)).unwrap_or(0.0)
}

pub fn minus_question_recall_tokens(
    context: &[String],
    question: &[String],
    answer: &[String],
    n: usize,
) -> Option<f64> {
    assert!(n >= 1, "n-gram order must be at least 1");
    let question = gram_set(question, n);
    let context = gram_set(context, n);
    let remaining: Vec<_> = gram_set(answer, n)
        .into_iter()
        .filter(|g| !question.contains(g))
        .collect();
    let hits = remaining.iter().filter(|g| context.contains(*g)).count();
    ratio(hits, remaining.len())
}

/// Fraction of the answer's n-gram set, minus the question's n-grams, that
/// occurs in the context. Set semantics; 0 when nothing remains.
pub fn minus_question_recall(context: &str, question: &str, answer: &str, n: usize) -> f64 {
    minus_question_recall_tokens(&tokenize(context), &tokenize(question), &tokenize(answer), n)
        .unwrap_or(0.0)
}
