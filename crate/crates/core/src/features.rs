//! The canonical 18-component feature vector, per-datapoint featurization,
//! and the tab-separated feature table format.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::ops::{Index, IndexMut};
use std::str::FromStr;

use rayon::prelude::*;
use serde::de::{self, MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::corpus::{Corpus, DataPoint, Label};
use crate::embedding::{cosine_checked, EmbeddedField, EmbeddingTable};
use crate::lexical::{
    self, fit_idf, jaccard_tokens, minus_question_recall_tokens, ngram_precision_tokens,
    ngram_recall_tokens, tfidf_cosine_tokens, IdfModel, PosTagger, RecallDenominator,
};
use crate::{Error, Result};

pub const FEATURE_COUNT: usize = 18;

macro_rules! features {
    ($($variant:ident => $name:literal, $label:literal, $lo:expr, $hi:expr;)*) => {
        #[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub enum Feature { $($variant),* }

        impl Feature {
            /// Canonical column order.
            pub const ALL: [Feature; FEATURE_COUNT] = [$(Feature::$variant),*];

            /// Column name used in feature tables and profiles.
            pub fn name(self) -> &'static str {
                match self { $(Feature::$variant => $name),* }
            }

            /// Human-readable row label for reports.
            pub fn label(self) -> &'static str {
                match self { $(Feature::$variant => $label),* }
            }

            /// Closed range every value of this component must lie in.
            pub fn bounds(self) -> (f64, f64) {
                match self { $(Feature::$variant => ($lo, $hi)),* }
            }
        }
    };
}

features! {
    BgeCtxQ => "bge_ctx_q", "bge-m3 context question cosine similarity", -1.0, 1.0;
    BgeCtxAns => "bge_ctx_ans", "bge-m3 context answer cosine similarity", -1.0, 1.0;
    BgeFcAns => "bge_fc_ans", "bge-m3 rubrics/FC answer cosine similarity", -1.0, 1.0;
    Recall2FcAns => "recall2_fc_ans", "recall 2gram FC answer", 0.0, 1.0;
    Recall2NcAns => "recall2_nc_ans", "recall 2gram NC answer", 0.0, 1.0;
    AnswerLen => "answer_len", "answer length", 0.0, f64::INFINITY;
    LexicalDensity => "lexical_density", "answer lexical density", 0.0, 1.0;
    Jaccard1QAns => "jaccard1_q_ans", "jaccard 1gram question answer", 0.0, 1.0;
    Jaccard1CtxAns => "jaccard1_ctx_ans", "jaccard 1gram context answer", 0.0, 1.0;
    Recall2QAns => "recall2_q_ans", "recall 2gram question answer", 0.0, 1.0;
    Recall2CtxAns => "recall2_ctx_ans", "recall 2gram context answer", 0.0, 1.0;
    Recall2CtxAnsMinusQ => "recall2_ctx_ans_minus_q",
        "recall 2gram context overlap with answer minus question", 0.0, 1.0;
    TfidfQAns => "tfidf_q_ans", "tfidf cosine question answer", 0.0, 1.0;
    TfidfCtxAns => "tfidf_ctx_ans", "tfidf cosine context answer", 0.0, 1.0;
    Precision1QAns => "precision1_q_ans", "precision 1gram question answer", 0.0, 1.0;
    Recall1QAns => "recall1_q_ans", "recall 1gram question answer", 0.0, 1.0;
    Recall1CtxAns => "recall1_ctx_ans", "recall 1gram context answer", 0.0, 1.0;
    Recall1CtxAnsMinusQ => "recall1_ctx_ans_minus_q",
        "recall 1gram context overlap with answer minus question", 0.0, 1.0;
}

impl Feature {
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Feature {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Feature::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| Error::Table(format!("unknown feature `{s}`")))
    }
}

/// Feature values in canonical order. Serialized as a name → value map.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct FeatureVector(pub [f64; FEATURE_COUNT]);

impl FeatureVector {
    pub fn zeros() -> Self {
        FeatureVector([0.0; FEATURE_COUNT])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }

    /// Components whose value lies outside [`Feature::bounds`] or is non-finite.
    pub fn out_of_range(&self) -> Vec<Feature> {
        Feature::ALL
            .into_iter()
            .filter(|f| {
                let (lo, hi) = f.bounds();
                let v = self[*f];
                !v.is_finite() || v < lo || v > hi
            })
            .collect()
    }
}

impl AsRef<[f64]> for FeatureVector {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

impl Index<Feature> for FeatureVector {
    type Output = f64;

    fn index(&self, f: Feature) -> &f64 {
        &self.0[f.index()]
    }
}

impl IndexMut<Feature> for FeatureVector {
    fn index_mut(&mut self, f: Feature) -> &mut f64 {
        &mut self.0[f.index()]
    }
}

impl Serialize for FeatureVector {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = serializer.serialize_map(Some(FEATURE_COUNT))?;
        for f in Feature::ALL {
            map.serialize_entry(f.name(), &self[f])?;
        }
        map.end()
    }
}

impl<'de> Deserialize<'de> for FeatureVector {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct FvVisitor;

        impl<'de> Visitor<'de> for FvVisitor {
            type Value = FeatureVector;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                write!(f, "a map with all {FEATURE_COUNT} feature names")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut map: A) -> std::result::Result<Self::Value, A::Error> {
                let mut values = [None; FEATURE_COUNT];
                while let Some((key, value)) = map.next_entry::<String, f64>()? {
                    let f: Feature = key.parse().map_err(de::Error::custom)?;
                    values[f.index()] = Some(value);
                }
                let mut out = FeatureVector::zeros();
                for f in Feature::ALL {
                    out[f] = values[f.index()]
                        .ok_or_else(|| de::Error::custom(format!("missing feature `{f}`")))?;
                }
                Ok(out)
            }
        }

        deserializer.deserialize_map(FvVisitor)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledRow {
    pub id: String,
    pub domain: String,
    pub label: Label,
    pub features: FeatureVector,
    /// Components computed from an empty denominator (and set to 0).
    pub degenerate: BTreeSet<Feature>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct LabeledFeatureSet {
    pub rows: Vec<LabeledRow>,
}

impl LabeledFeatureSet {
    pub fn new(rows: Vec<LabeledRow>) -> Result<Self> {
        let mut seen = HashSet::new();
        for row in &rows {
            if !seen.insert(row.id.as_str()) {
                return Err(Error::DuplicateId(row.id.clone()));
            }
        }
        Ok(LabeledFeatureSet { rows })
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn vectors(&self) -> Vec<FeatureVector> {
        self.rows.iter().map(|r| r.features).collect()
    }

    /// Componentwise mean over all rows.
    pub fn mean(&self) -> Result<FeatureVector> {
        mean_of(self.rows.iter().map(|r| &r.features))
            .ok_or(Error::EmptyInput("feature set"))
    }
}

pub(crate) fn mean_of<'a>(rows: impl Iterator<Item = &'a FeatureVector>) -> Option<FeatureVector> {
    let mut sum = [0.0; FEATURE_COUNT];
    let mut n = 0usize;
    for r in rows {
        for (s, v) in sum.iter_mut().zip(r.0) {
            *s += v;
        }
        n += 1;
    }
    (n > 0).then(|| FeatureVector(sum.map(|s| s / n as f64)))
}

/// Componentwise mean of the rows carrying each label present in the set.
pub fn mean_by_label(features: &LabeledFeatureSet) -> BTreeMap<Label, FeatureVector> {
    let labels: BTreeSet<Label> = features.rows.iter().map(|r| r.label).collect();
    labels
        .into_iter()
        .map(|l| {
            let mean = mean_of(features.rows.iter().filter(|r| r.label == l).map(|r| &r.features));
            (l, mean.expect("label taken from the rows"))
        })
        .collect()
}

/// Mean of the rows with `label`; errors if there are none.
pub fn label_mean(features: &LabeledFeatureSet, label: Label) -> Result<FeatureVector> {
    mean_of(features.rows.iter().filter(|r| r.label == label).map(|r| &r.features))
        .ok_or(Error::LabelMissing(label))
}

/// IDF model over every context, question and answer of the corpus, one document per field.
pub fn fit_corpus_idf(corpus: &Corpus) -> Result<IdfModel> {
    let texts: Vec<&str> = corpus
        .iter()
        .flat_map(|d| [d.context.as_str(), d.question.as_str(), d.answer.as_str()])
        .collect();
    fit_idf(&texts)
}

fn featurize_one(
    dp: &DataPoint,
    idf: &IdfModel,
    emb: &EmbeddingTable,
    tagger: &dyn PosTagger,
) -> Result<LabeledRow> {
    use Feature::*;
    use RecallDenominator::{TargetNgrams, TargetTokens};

    let ctx = lexical::tokenize(&dp.context);
    let q = lexical::tokenize(&dp.question);
    let ans = lexical::tokenize(&dp.answer);
    let fc = lexical::tokenize(&dp.rubric_fc);
    let nc = lexical::tokenize(&dp.rubric_nc);

    let e_ctx = emb.require(&dp.id, EmbeddedField::Context)?;
    let e_q = emb.require(&dp.id, EmbeddedField::Question)?;
    let e_ans = emb.require(&dp.id, EmbeddedField::Answer)?;
    let e_fc = emb.require(&dp.id, EmbeddedField::RubricFc)?;

    let values: [(Feature, Option<f64>); FEATURE_COUNT] = [
        (BgeCtxQ, cosine_checked(e_ctx, e_q)?),
        (BgeCtxAns, cosine_checked(e_ctx, e_ans)?),
        (BgeFcAns, cosine_checked(e_fc, e_ans)?),
        (Recall2FcAns, ngram_recall_tokens(&fc, &ans, 2, TargetTokens)),
        (Recall2NcAns, ngram_recall_tokens(&nc, &ans, 2, TargetTokens)),
        (AnswerLen, Some(ans.len() as f64)),
        (LexicalDensity, lexical::lexical_density_tokens(&dp.id, &ans, tagger)?),
        (Jaccard1QAns, jaccard_tokens(&q, &ans)),
        (Jaccard1CtxAns, jaccard_tokens(&ctx, &ans)),
        (Recall2QAns, ngram_recall_tokens(&q, &ans, 2, TargetNgrams)),
        (Recall2CtxAns, ngram_recall_tokens(&ctx, &ans, 2, TargetNgrams)),
        (Recall2CtxAnsMinusQ, minus_question_recall_tokens(&ctx, &q, &ans, 2)),
        (TfidfQAns, tfidf_cosine_tokens(&q, &ans, idf)),
        (TfidfCtxAns, tfidf_cosine_tokens(&ctx, &ans, idf)),
        (Precision1QAns, ngram_precision_tokens(&q, &ans, 1)),
        (Recall1QAns, ngram_recall_tokens(&q, &ans, 1, TargetNgrams)),
        (Recall1CtxAns, ngram_recall_tokens(&ctx, &ans, 1, TargetNgrams)),
        (Recall1CtxAnsMinusQ, minus_question_recall_tokens(&ctx, &q, &ans, 1)),
    ];

    let mut features = FeatureVector::zeros();
    let mut degenerate = BTreeSet::new();
    for (f, v) in values {
        match v {
            Some(v) => features[f] = v,
            None => {
                degenerate.insert(f);
            }
        }
    }
    Ok(LabeledRow {
        id: dp.id.clone(),
        domain: dp.domain.clone(),
        label: dp.label,
        features,
        degenerate,
    })
}

/// Computes one feature row per datapoint, in corpus order.
///
/// Rows are computed in parallel on the current rayon pool; each row depends
/// only on its own datapoint and the shared IDF model, so the output does not
/// depend on the thread count.
pub fn featurize(
    corpus: &Corpus,
    idf: &IdfModel,
    emb: &EmbeddingTable,
    tagger: &dyn PosTagger,
) -> Result<LabeledFeatureSet> {
    if corpus.is_empty() {
        return Err(Error::EmptyInput("corpus"));
    }
    let rows = corpus
        .datapoints
        .par_iter()
        .map(|dp| featurize_one(dp, idf, emb, tagger))
        .collect::<Result<Vec<_>>>()?;
    LabeledFeatureSet::new(rows)
}

const ID_COLUMNS: [&str; 3] = ["id", "domain", "label"];
const FLAG_COLUMN: &str = "degenerate";

/// Writes the feature table: `id, domain, label`, the 18 canonical columns,
/// then a `degenerate` column of `;`-joined component names.
pub fn write_features<W: Write>(set: &LabeledFeatureSet, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().delimiter(b'\t').from_writer(out);
    let header: Vec<&str> = ID_COLUMNS
        .into_iter()
        .chain(Feature::ALL.iter().map(|f| f.name()))
        .chain([FLAG_COLUMN])
        .collect();
    w.write_record(&header)?;
    for row in &set.rows {
        let mut record = vec![row.id.clone(), row.domain.clone(), row.label.to_string()];
        record.extend(row.features.0.iter().map(|v| v.to_string()));
        record.push(
            row.degenerate
                .iter()
                .map(|f| f.name())
                .collect::<Vec<_>>()
                .join(";"),
        );
        w.write_record(&record)?;
    }
    w.flush().map_err(|e| Error::io("<feature table>", e))?;
    Ok(())
}

pub fn read_features<R: Read>(input: R) -> Result<LabeledFeatureSet> {
    let mut r = csv::ReaderBuilder::new().delimiter(b'\t').from_reader(input);
    let header = r.headers()?.clone();
    let expected: Vec<&str> = ID_COLUMNS
        .into_iter()
        .chain(Feature::ALL.iter().map(|f| f.name()))
        .chain([FLAG_COLUMN])
        .collect();
    if header.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Table(format!(
            "header does not match the canonical columns: {:?}",
            header.iter().collect::<Vec<_>>()
        )));
    }
    let mut rows = Vec::new();
    for (i, record) in r.records().enumerate() {
        let record = record?;
        let bad = |what: String| Error::Table(format!("row {}: {what}", i + 1));
        let label: Label = record[2]
            .parse()
            .ok()
            .filter(|l| *l <= 2)
            .ok_or_else(|| bad(format!("invalid label `{}`", &record[2])))?;
        let mut features = FeatureVector::zeros();
        for f in Feature::ALL {
            let cell = &record[3 + f.index()];
            features[f] = cell
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| bad(format!("invalid value `{cell}` for {f}")))?;
        }
        let flags = &record[3 + FEATURE_COUNT];
        let degenerate = flags
            .split(';')
            .filter(|s| !s.is_empty())
            .map(str::parse)
            .collect::<Result<BTreeSet<Feature>>>()?;
        rows.push(LabeledRow {
            id: record[0].to_string(),
            domain: record[1].to_string(),
            label,
            features,
            degenerate,
        });
    }
    LabeledFeatureSet::new(rows)
}
