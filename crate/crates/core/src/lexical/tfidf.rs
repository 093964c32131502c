use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::tokenize;
use crate::{Error, Result};

/// Document frequencies for smoothed IDF weighting:
/// `idf(t) = ln((1 + n_docs) / (1 + df(t))) + 1`, with `df = 0` for unseen terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IdfModel {
    n_docs: usize,
    df: BTreeMap<String, usize>,
}

impl IdfModel {
    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn df(&self, term: &str) -> usize {
        self.df.get(term).copied().unwrap_or(0)
    }

    pub fn idf(&self, term: &str) -> f64 {
        ((1 + self.n_docs) as f64 / (1 + self.df(term)) as f64).ln() + 1.0
    }

    pub fn vocabulary_size(&self) -> usize {
        self.df.len()
    }

    /// L2-normalized TF-IDF weights (raw counts times IDF). Empty for empty input.
    fn weights<'t>(&self, tokens: &'t [String]) -> BTreeMap<&'t str, f64> {
        // ordered so that every sum below runs in a fixed order
        let mut counts: BTreeMap<&str, f64> = BTreeMap::new();
        for t in tokens {
            *counts.entry(t.as_str()).or_insert(0.0) += 1.0;
        }
        for (term, w) in counts.iter_mut() {
            *w *= self.idf(term);
        }
        let norm = counts.values().map(|w| w * w).sum::<f64>().sqrt();
        if norm > 0.0 {
            counts.values_mut().for_each(|w| *w /= norm);
        }
        counts
    }
}

/// Fits document frequencies over `texts`, one document per text.
pub fn fit_idf<S: AsRef<str>>(texts: &[S]) -> Result<IdfModel> {
    if texts.is_empty() {
        return Err(Error::EmptyInput("IDF fitting corpus"));
    }
    let mut df = BTreeMap::new();
    for text in texts {
        let terms: BTreeSet<String> = tokenize(text.as_ref()).into_iter().collect();
        for t in terms {
            *df.entry(t).or_insert(0) += 1;
        }
    }
    Ok(IdfModel {
        n_docs: texts.len(),
        df,
    })
}

pub fn tfidf_cosine_tokens(a: &[String], b: &[String], model: &IdfModel) -> Option<f64> {
    let wa = model.weights(a);
    let wb = model.weights(b);
    if wa.is_empty() || wb.is_empty() {
        return None;
    }
    let (small, large) = if wa.len() <= wb.len() { (&wa, &wb) } else { (&wb, &wa) };
    let dot: f64 = small
        .iter()
        .map(|(t, w)| w * large.get(t).copied().unwrap_or(0.0))
        .sum();
    Some(dot.clamp(0.0, 1.0))
}

/// Cosine between TF-IDF vectors of `a` and `b`; 0 if either has no tokens.
pub fn tfidf_cosine(a: &str, b: &str, model: &IdfModel) -> f64 {
    tfidf_cosine_tokens(&tokenize(a), &tokenize(b), model).unwrap_or(0.0)
}
