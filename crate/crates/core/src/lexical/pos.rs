use std::collections::HashMap;
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::tokenize;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PosTag {
    Noun,
    Verb,
    Adjective,
    Adverb,
    /// Everything else: determiners, pronouns, prepositions, numerals...
    Function,
}

impl PosTag {
    pub fn is_content(self) -> bool {
        !matches!(self, PosTag::Function)
    }

    /// Maps a Penn Treebank (`NN`, `VBZ`, `RB`...) or universal (`NOUN`, `ADV`...)
    /// tag string onto the coarse tag set.
    pub fn from_tag_str(tag: &str) -> PosTag {
        let t = tag.trim().to_ascii_uppercase();
        match t.as_str() {
            "NOUN" | "PROPN" => PosTag::Noun,
            "VERB" => PosTag::Verb,
            "ADJ" => PosTag::Adjective,
            "ADV" => PosTag::Adverb,
            _ if t.starts_with("NN") => PosTag::Noun,
            _ if t.starts_with("VB") => PosTag::Verb,
            _ if t.starts_with("JJ") => PosTag::Adjective,
            _ if t.starts_with("RB") => PosTag::Adverb,
            _ => PosTag::Function,
        }
    }
}

/// Assigns one tag per token of a document's answer.
pub trait PosTagger: Send + Sync {
    fn id(&self) -> &str;

    fn tag(&self, doc_id: &str, tokens: &[String]) -> Result<Vec<PosTag>>;
}

const FUNCTION_WORDS: &[&str] = &[
    // determiners
    "the", "a", "an", "this", "that", "these", "those", "some", "any", "each", "every", "no",
    "all", "both", "either", "neither", "another", "such", "what", "which", "whose", "whatever",
    "whichever", "many", "much", "few", "several",
    // pronouns
    "i", "me", "my", "mine", "you", "your", "yours", "he", "him", "his", "she", "her", "hers",
    "it", "its", "we", "us", "our", "ours", "they", "them", "their", "theirs", "myself",
    "yourself", "himself", "herself", "itself", "ourselves", "yourselves", "themselves", "who",
    "whom", "whoever", "one", "ones",
    // prepositions and particles
    "of", "in", "on", "at", "by", "for", "with", "about", "against", "between", "into",
    "through", "during", "before", "after", "above", "below", "to", "from", "over", "under",
    "since", "until", "upon", "within", "without", "across", "along", "among", "around",
    "behind", "beyond", "despite", "except", "inside", "like", "near", "onto", "outside", "per",
    "toward", "towards", "via", "amid", "beside", "besides", "throughout", "unlike",
    // conjunctions
    "and", "or", "but", "nor", "yet", "if", "because", "although", "though", "while", "whereas",
    "unless", "whether", "than", "as",
    // modals
    "can", "could", "may", "might", "must", "shall", "should", "will", "would",
    // existential, interjections
    "there", "oh", "yes", "yeah", "uh", "um", "ok", "okay",
];

const COMMON_VERBS: &[&str] = &[
    "is", "are", "was", "were", "be", "been", "being", "am", "have", "has", "had", "having", "do",
    "does", "did", "done", "make", "makes", "made", "go", "goes", "went", "gone", "get", "gets",
    "got", "say", "says", "said", "see", "saw", "seen", "know", "knew", "known", "think",
    "thought", "take", "took", "taken", "give", "gave", "given", "find", "found", "show", "shows",
    "shown", "use", "uses", "mean", "means", "meant", "run", "runs", "ran", "want", "need",
    "needs", "help", "helps", "keep", "keeps", "kept", "let", "put", "cause", "causes", "become",
    "became", "leave", "left", "feel", "felt",
];

const COMMON_ADVERBS: &[&str] = &[
    "not", "very", "also", "too", "just", "only", "then", "now", "here", "so", "still", "even",
    "again", "never", "always", "often", "sometimes", "soon", "already", "almost", "quite",
    "rather", "well", "fast", "away", "back", "up", "down", "out", "off",
];

/// Closed-class lexicon plus suffix heuristics; unknown words default to noun.
#[derive(Debug, Clone, Copy, Default)]
pub struct HeuristicTagger;

impl HeuristicTagger {
    pub fn tag_token(token: &str) -> PosTag {
        // "they're" and "it's" take the class of their head
        let head = token.split('\'').next().unwrap_or(token);
        if head.is_empty() || head.chars().all(|c| c.is_numeric()) {
            return PosTag::Function;
        }
        if FUNCTION_WORDS.contains(&head) {
            return PosTag::Function;
        }
        if COMMON_VERBS.contains(&head) {
            return PosTag::Verb;
        }
        if COMMON_ADVERBS.contains(&head) {
            return PosTag::Adverb;
        }
        let long = head.chars().count() > 4;
        if long && head.ends_with("ly") {
            PosTag::Adverb
        } else if long && (head.ends_with("ing") || head.ends_with("ed") || head.ends_with("ize")) {
            PosTag::Verb
        } else if ["tion", "sion", "ness", "ment", "ity", "ism", "ship", "ance", "ence"]
            .iter()
            .any(|s| head.ends_with(s))
        {
            PosTag::Noun
        } else if long
            && ["ous", "ful", "ive", "able", "ible", "al", "ic", "less", "ish", "est"]
                .iter()
                .any(|s| head.ends_with(s))
        {
            PosTag::Adjective
        } else {
            PosTag::Noun
        }
    }
}

impl PosTagger for HeuristicTagger {
    fn id(&self) -> &str {
        "heuristic-v1"
    }

    fn tag(&self, _doc_id: &str, tokens: &[String]) -> Result<Vec<PosTag>> {
        Ok(tokens.iter().map(|t| Self::tag_token(t)).collect())
    }
}

/// One line of the precomputed-tags file.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TagRecord {
    pub id: String,
    pub field: String,
    pub tags: Vec<String>,
}

/// Externally supplied answer tags, falling back to [`HeuristicTagger`] for
/// documents without an entry.
#[derive(Debug, Clone, Default)]
pub struct PrecomputedTagger {
    tags: HashMap<String, Vec<PosTag>>,
}

impl PrecomputedTagger {
    pub fn from_records(records: impl IntoIterator<Item = TagRecord>) -> Result<Self> {
        let mut tags = HashMap::new();
        for rec in records {
            if rec.field != "answer" {
                return Err(Error::InvalidParameter(format!(
                    "tags for `{}`: unsupported field `{}` (only `answer`)",
                    rec.id, rec.field
                )));
            }
            let parsed = rec.tags.iter().map(|t| PosTag::from_tag_str(t)).collect();
            if tags.insert(rec.id.clone(), parsed).is_some() {
                return Err(Error::DuplicateId(rec.id));
            }
        }
        Ok(PrecomputedTagger { tags })
    }

    pub fn len(&self) -> usize {
        self.tags.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tags.is_empty()
    }
}

impl PosTagger for PrecomputedTagger {
    fn id(&self) -> &str {
        "precomputed"
    }

    fn tag(&self, doc_id: &str, tokens: &[String]) -> Result<Vec<PosTag>> {
        match self.tags.get(doc_id) {
            Some(tags) if tags.len() == tokens.len() => Ok(tags.clone()),
            Some(tags) => Err(Error::TagMismatch {
                id: doc_id.to_string(),
                tokens: tokens.len(),
                tags: tags.len(),
            }),
            None => HeuristicTagger.tag(doc_id, tokens),
        }
    }
}

/// Reads a line-delimited tags file (`{id, field, tags}`); `#` lines are comments.
pub fn load_tags(path: impl AsRef<Path>) -> Result<PrecomputedTagger> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut records = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let rec: TagRecord = serde_json::from_str(line).map_err(|e| Error::InvalidRecord {
            line: i + 1,
            reason: e.to_string(),
        })?;
        records.push(rec);
    }
    PrecomputedTagger::from_records(records)
}

pub fn lexical_density_tokens(
    doc_id: &str,
    tokens: &[String],
    tagger: &dyn PosTagger,
) -> Result<Option<f64>> {
    if tokens.is_empty() {
        return Ok(None);
    }
    let tags = tagger.tag(doc_id, tokens)?;
    let content = tags.iter().filter(|t| t.is_content()).count();
    Ok(Some(content as f64 / tokens.len() as f64))
}

/// Share of answer tokens tagged noun, verb, adjective or adverb; 0 for an empty answer.
pub fn lexical_density(answer: &str, tagger: &dyn PosTagger) -> Result<f64> {
    Ok(lexical_density_tokens("", &tokenize(answer), tagger)?.unwrap_or(0.0))
}
