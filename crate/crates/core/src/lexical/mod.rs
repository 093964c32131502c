//! Tokenization and the lexical text-pair features: n-gram recall/precision,
//! Jaccard overlap, TF-IDF cosine, lexical density and answer length.
//!
//! Each metric comes in two flavors: a token-level function returning `None`
//! when its denominator is empty (used by featurization to flag degenerate
//! values), and a text-level wrapper that maps that case to `0.0`.

mod ngram;
mod pos;
mod tfidf;

pub use ngram::{
    jaccard_tokens, jaccard_unigram, minus_question_recall, minus_question_recall_tokens,
    ngram_precision, ngram_precision_tokens, ngram_recall, ngram_recall_tokens, NgramBag,
    RecallDenominator,
};
pub use pos::{
    lexical_density, lexical_density_tokens, load_tags, HeuristicTagger, PosTag, PosTagger,
    PrecomputedTagger, TagRecord,
};
pub use tfidf::{fit_idf, tfidf_cosine, tfidf_cosine_tokens, IdfModel};

/// Lowercases and splits text into maximal runs of letters, digits and
/// apostrophes. Apostrophes at token edges are trimmed, and typographic
/// apostrophes (`’`) are normalized to `'`.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    let mut flush = |current: &mut String| {
        let trimmed = current.trim_matches('\'');
        if !trimmed.is_empty() {
            tokens.push(trimmed.to_string());
        }
        current.clear();
    };
    for c in text.chars() {
        if c.is_alphanumeric() {
            current.extend(c.to_lowercase());
        } else if c == '\'' || c == '’' {
            current.push('\'');
        } else {
            flush(&mut current);
        }
    }
    flush(&mut current);
    tokens
}

pub fn answer_length(answer: &str) -> usize {
    tokenize(answer).len()
}
