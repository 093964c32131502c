//! Graded short-answer records and their line-delimited JSON interchange format.
//!
//! One JSON object per line with the fields `id`, `domain`, `context`,
//! `question`, `rubric_fc`, `rubric_pc`, `rubric_nc`, `answer`, `label`.
//! Field order is irrelevant. Unknown fields are carried through to
//! [`write_corpus`] untouched and never read by any computation.

use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::{Error, Result};

/// Credit level: 0 = no credit, 1 = partial credit, 2 = full credit.
pub type Label = u8;

pub const LABELS: [Label; 3] = [0, 1, 2];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataPoint {
    pub id: String,
    pub domain: String,
    pub context: String,
    pub question: String,
    pub rubric_fc: String,
    #[serde(default)]
    pub rubric_pc: String,
    pub rubric_nc: String,
    pub answer: String,
    pub label: Label,
    #[serde(flatten)]
    pub extra: Map<String, Value>,
}

impl DataPoint {
    /// Checks the record-level invariants (label range, required non-blank text).
    pub fn validate(&self) -> std::result::Result<(), String> {
        if self.label > 2 {
            return Err(format!("label {} outside {{0, 1, 2}}", self.label));
        }
        let required = [
            ("id", &self.id),
            ("domain", &self.domain),
            ("context", &self.context),
            ("question", &self.question),
            ("rubric_fc", &self.rubric_fc),
            ("rubric_nc", &self.rubric_nc),
            ("answer", &self.answer),
        ];
        for (name, value) in required {
            if value.trim().is_empty() {
                return Err(format!("field `{name}` is empty"));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub name: String,
    pub datapoints: Vec<DataPoint>,
}

impl Corpus {
    pub fn len(&self) -> usize {
        self.datapoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.datapoints.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, DataPoint> {
        self.datapoints.iter()
    }
}

/// A record skipped during lenient loading.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Skipped {
    pub line: usize,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct LoadReport {
    pub skipped: Vec<Skipped>,
}

const REQUIRED_FIELDS: [&str; 8] = [
    "id",
    "domain",
    "context",
    "question",
    "rubric_fc",
    "rubric_nc",
    "answer",
    "label",
];

fn parse_record(line: &str) -> std::result::Result<DataPoint, String> {
    let value: Value = serde_json::from_str(line).map_err(|e| format!("malformed JSON: {e}"))?;
    let obj = value
        .as_object()
        .ok_or_else(|| "record is not a JSON object".to_string())?;
    for field in REQUIRED_FIELDS {
        if !obj.contains_key(field) {
            return Err(format!("missing required field `{field}`"));
        }
    }
    match obj["label"].as_u64() {
        Some(l) if l <= 2 => {}
        _ => return Err(format!("label {} outside {{0, 1, 2}}", obj["label"])),
    }
    let dp: DataPoint = serde_json::from_value(value).map_err(|e| e.to_string())?;
    dp.validate()?;
    Ok(dp)
}

/// Parses corpus text. In strict mode the first invalid record aborts; in lenient
/// mode invalid records are skipped and reported. Duplicate ids are always fatal.
pub fn parse_corpus(name: &str, text: &str, strict: bool) -> Result<(Corpus, LoadReport)> {
    let mut datapoints = Vec::new();
    let mut report = LoadReport::default();
    let mut seen = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        let line_no = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        match parse_record(line) {
            Ok(dp) => {
                if !seen.insert(dp.id.clone()) {
                    return Err(Error::DuplicateId(dp.id));
                }
                datapoints.push(dp);
            }
            Err(reason) if strict => {
                return Err(Error::InvalidRecord {
                    line: line_no,
                    reason,
                })
            }
            Err(reason) => report.skipped.push(Skipped {
                line: line_no,
                reason,
            }),
        }
    }
    Ok((
        Corpus {
            name: name.to_string(),
            datapoints,
        },
        report,
    ))
}

pub fn load_corpus(path: impl AsRef<Path>, strict: bool) -> Result<(Corpus, LoadReport)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    parse_corpus(&name, &text, strict)
}

pub fn write_corpus<W: Write>(corpus: &Corpus, mut out: W) -> Result<()> {
    for dp in &corpus.datapoints {
        serde_json::to_writer(&mut out, dp)?;
        out.write_all(b"\n").map_err(|e| Error::io("<output>", e))?;
    }
    Ok(())
}
