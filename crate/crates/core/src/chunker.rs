//! Sentence segmentation and random-length chunking of source text into contexts.

use std::sync::LazyLock;

use rand::Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::rng::{self, SeededRng};
use crate::{Error, Result, DEFAULT_CHUNK_MAX_WORDS, DEFAULT_CHUNK_MIN_WORDS};

/// Candidate boundary: terminal punctuation, optional closing quotes/brackets,
/// whitespace, then an optional opening quote and an uppercase letter or digit.
static BOUNDARY: LazyLock<Regex> = LazyLock::new(|| {
    Regex::new(r#"[.!?]+["'”’)\]]*(\s+)["'“‘(\[]?[\p{Lu}\p{Nd}]"#).unwrap()
});

/// Lowercased tokens that end in a period without ending a sentence.
const ABBREVIATIONS: &[&str] = &[
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "mt", "ft", "rev", "gen", "col", "capt",
    "lt", "sgt", "gov", "sen", "rep", "hon", "vs", "etc", "e.g", "i.e", "cf", "al", "fig", "figs",
    "no", "nos", "vol", "vols", "pp", "p", "ed", "eds", "inc", "ltd", "co", "corp", "dept", "univ",
    "approx", "est", "jan", "feb", "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov",
    "dec", "u.s", "u.k", "a.m", "p.m", "ca", "c",
];

fn is_abbreviation(text_before: &str) -> bool {
    let word = text_before
        .rsplit(char::is_whitespace)
        .next()
        .unwrap_or("")
        .trim_start_matches(['(', '"', '\'', '“', '‘', '[']);
    let Some(stem) = word.strip_suffix('.') else {
        return false;
    };
    if stem.is_empty() {
        return false;
    }
    // Single initials such as "J." in "J. Smith".
    let mut chars = stem.chars();
    if let (Some(c), None) = (chars.next(), chars.next()) {
        if c.is_uppercase() {
            return true;
        }
    }
    ABBREVIATIONS.contains(&stem.to_lowercase().as_str())
}

/// Splits text into sentences.
///
/// A boundary sits after terminal punctuation (`.`, `!`, `?`, plus any closing
/// quotes or brackets) that is followed by whitespace and an uppercase letter
/// or digit, unless the period closes a known abbreviation or a single initial.
pub fn segment_sentences(text: &str) -> Vec<String> {
    let mut sentences = Vec::new();
    let mut start = 0;
    for caps in BOUNDARY.captures_iter(text) {
        let gap = caps.get(1).unwrap();
        let end = gap.start();
        if end <= start {
            continue;
        }
        let candidate = &text[start..end];
        if candidate.ends_with('.') && is_abbreviation(candidate) {
            continue;
        }
        let trimmed = candidate.trim();
        if !trimmed.is_empty() {
            sentences.push(trimmed.to_string());
        }
        start = gap.end();
    }
    let tail = text[start..].trim();
    if !tail.is_empty() {
        sentences.push(tail.to_string());
    }
    sentences
}

/// Whitespace-delimited word count.
pub fn word_count(text: &str) -> usize {
    text.split_whitespace().count()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TargetPolicy {
    /// Draw a fresh target length for every chunk.
    PerChunk,
    /// Draw one target per document and reuse it for every chunk.
    PerDocument,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChunkParams {
    pub min_words: usize,
    pub max_words: usize,
    pub seed: u64,
    pub target_policy: TargetPolicy,
}

impl ChunkParams {
    pub fn new(seed: u64) -> Self {
        ChunkParams {
            min_words: DEFAULT_CHUNK_MIN_WORDS,
            max_words: DEFAULT_CHUNK_MAX_WORDS,
            seed,
            target_policy: TargetPolicy::PerChunk,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_words == 0 || self.min_words > self.max_words {
            return Err(Error::InvalidParameter(format!(
                "chunk bounds must satisfy 0 < min ({}) <= max ({})",
                self.min_words, self.max_words
            )));
        }
        Ok(())
    }
}

/// A chunk together with the target length that closed it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Chunk {
    pub text: String,
    pub words: usize,
    pub target: usize,
    /// Index range into the input sentence list.
    pub sentences: std::ops::Range<usize>,
}

fn draw_target(rng: &mut SeededRng, params: &ChunkParams) -> usize {
    rng.random_range(params.min_words..=params.max_words)
}

/// Concatenates consecutive sentences until each chunk reaches its target word
/// count, using an RNG seeded directly from `params.seed`.
///
/// The trailing partial chunk is kept only if it has at least `min_words` words.
pub fn chunk_detailed(sentences: &[String], params: &ChunkParams) -> Result<Vec<Chunk>> {
    params.validate()?;
    let mut rng = rng::from_seed(params.seed);
    let mut chunks = Vec::new();
    let mut target = draw_target(&mut rng, params);
    let mut begin = 0;
    let mut words = 0;
    for (i, sentence) in sentences.iter().enumerate() {
        words += word_count(sentence);
        if words >= target {
            chunks.push(Chunk {
                text: sentences[begin..=i].join(" "),
                words,
                target,
                sentences: begin..i + 1,
            });
            begin = i + 1;
            words = 0;
            if params.target_policy == TargetPolicy::PerChunk {
                target = draw_target(&mut rng, params);
            }
        }
    }
    if begin < sentences.len() && words >= params.min_words {
        chunks.push(Chunk {
            text: sentences[begin..].join(" "),
            words,
            target,
            sentences: begin..sentences.len(),
        });
    }
    Ok(chunks)
}

pub fn chunk(sentences: &[String], params: &ChunkParams) -> Result<Vec<String>> {
    Ok(chunk_detailed(sentences, params)?
        .into_iter()
        .map(|c| c.text)
        .collect())
}

/// Segments and chunks one document, seeding its RNG from `(params.seed, doc_id)`
/// so the result does not depend on which other documents are processed.
pub fn chunk_document(doc_id: &str, text: &str, params: &ChunkParams) -> Result<Vec<String>> {
    let doc_params = ChunkParams {
        seed: rng::derive_seed(params.seed, doc_id),
        ..*params
    };
    chunk(&segment_sentences(text), &doc_params)
}
