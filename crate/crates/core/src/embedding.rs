//! Dense embeddings produced outside this crate, and the cosine features built on them.
//!
//! Interchange format: one JSON object per line, `{"id", "field", "vector"}`,
//! where `field` is one of `context`, `question`, `answer`, `rubric_fc`. Lines
//! starting with `#` are comments (the producer records model and pooling
//! settings there). The dimension is fixed by the first row.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EmbeddedField {
    Context,
    Question,
    Answer,
    RubricFc,
}

impl EmbeddedField {
    pub const ALL: [EmbeddedField; 4] = [
        EmbeddedField::Context,
        EmbeddedField::Question,
        EmbeddedField::Answer,
        EmbeddedField::RubricFc,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EmbeddedField::Context => "context",
            EmbeddedField::Question => "question",
            EmbeddedField::Answer => "answer",
            EmbeddedField::RubricFc => "rubric_fc",
        }
    }
}

impl fmt::Display for EmbeddedField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EmbeddedField {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EmbeddedField::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown embedding field `{s}`")))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EmbeddingRow {
    pub id: String,
    pub field: String,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    entries: HashMap<(String, EmbeddedField), Vec<f64>>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            entries: HashMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Adds a vector, enforcing uniform dimension, finiteness and unique keys.
    /// The first insertion into an empty zero-dimension table fixes the dimension.
    pub fn insert(&mut self, id: &str, field: EmbeddedField, vector: Vec<f64>) -> Result<()> {
        if self.dim == 0 && self.entries.is_empty() {
            self.dim = vector.len();
        }
        if vector.is_empty() || vector.len() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                found: vector.len(),
            });
        }
        if let Some(bad) = vector.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "non-finite component {bad} in embedding ({id}, {field})"
            )));
        }
        let key = (id.to_string(), field);
        if self.entries.contains_key(&key) {
            return Err(Error::DuplicateId(format!("{id}/{field}")));
        }
        self.entries.insert(key, vector);
        Ok(())
    }

    pub fn get(&self, id: &str, field: EmbeddedField) -> Option<&[f64]> {
        // HashMap<(String, _)> cannot be probed with (&str, _) without allocating
        self.entries
            .get(&(id.to_string(), field))
            .map(Vec::as_slice)
    }

    pub fn require(&self, id: &str, field: EmbeddedField) -> Result<&[f64]> {
        self.get(id, field).ok_or_else(|| Error::MissingEmbedding {
            id: id.to_string(),
            field: field.to_string(),
        })
    }
}

pub fn parse_embeddings(text: &str) -> Result<EmbeddingTable> {
    let mut table = EmbeddingTable::new(0);
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let wrap = |reason: String| Error::InvalidRecord {
            line: i + 1,
            reason,
        };
        // serde_json rejects NaN/Infinity literals, which is what we want
        let row: EmbeddingRow = serde_json::from_str(line).map_err(|e| wrap(e.to_string()))?;
        let field: EmbeddedField = row.field.parse().map_err(|e: Error| wrap(e.to_string()))?;
        table
            .insert(&row.id, field, row.vector)
            .map_err(|e| wrap(e.to_string()))?;
    }
    Ok(table)
}

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingTable> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_embeddings(&text)
}

/// Cosine similarity, or `None` when either vector has zero norm.
pub fn cosine_checked(u: &[f64], v: &[f64]) -> Result<Option<f64>> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: u.len(),
            found: v.len(),
        });
    }
    let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
    let nu = u.iter().map(|a| a * a).sum::<f64>().sqrt();
    let nv = v.iter().map(|b| b * b).sum::<f64>().sqrt();
    if nu == 0.0 || nv == 0.0 {
        return Ok(None);
    }
    Ok(Some((dot / (nu * nv)).clamp(-1.0, 1.0)))
}

/// `u·v / (|u||v|)`, 0 if either norm is 0.
pub fn cosine(u: &[f64], v: &[f64]) -> Result<f64> {
    Ok(cosine_checked(u, v)?.unwrap_or(0.0))
}
