//! Derived-text-format features and reference-matched subset selection for
//! rubric-graded short-answer datasets.
//!
//! The pipeline runs in stages, each usable on its own:
//!
//! 1. [`chunker`] turns raw source text into context-sized chunks.
//! 2. [`corpus`] loads graded records (context, question, rubric, answer, label).
//! 3. [`features`] computes the 18 text-pair features per record, using the
//!    overlap metrics in [`lexical`] and externally produced embeddings read by
//!    [`embedding`].
//! 4. [`selection`] summarizes a reference feature set into a shareable
//!    [`selection::ReferenceProfile`] and picks the candidate records closest to it.
//! 5. [`stats`] holds the evaluation statistics (Wilcoxon signed-rank, quadratic
//!    weighted kappa, balanced accuracy, feature-mean difference tables).

pub mod chunker;
pub mod clustering;
pub mod corpus;
pub mod embedding;
mod error;
pub mod features;
pub mod lexical;
pub mod rng;
pub mod selection;
pub mod stats;

pub use error::{Error, Result};

/// Selection fraction used by every method unless overridden.
pub const DEFAULT_FRACTION: f64 = 0.05;
/// Number of k-means representatives summarizing the reference.
pub const DEFAULT_K: usize = 8;
/// Number of nearest reference rows averaged by the rank method.
pub const DEFAULT_M: usize = 5;
/// Few-shot examples drawn per domain.
pub const DEFAULT_FEWSHOT_PER_DOMAIN: usize = 2;
pub const DEFAULT_CHUNK_MIN_WORDS: usize = 150;
pub const DEFAULT_CHUNK_MAX_WORDS: usize = 800;
