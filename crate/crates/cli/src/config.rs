//! Run configuration: built-in defaults, overlaid by an optional JSON config
//! file, overlaid by command-line flags.

use std::collections::BTreeMap;
use std::path::Path;

use anyhow::{bail, Context, Result};
use dtfsel_core::chunker::TargetPolicy;
use dtfsel_core::selection::Grouping;
use dtfsel_core::stats::{BalancedMode, ModeChoice, ZeroMethod};
use dtfsel_core::{
    DEFAULT_CHUNK_MAX_WORDS, DEFAULT_CHUNK_MIN_WORDS, DEFAULT_FEWSHOT_PER_DOMAIN, DEFAULT_FRACTION,
    DEFAULT_K, DEFAULT_M,
};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChunkConfig {
    pub min_words: usize,
    pub max_words: usize,
    pub target_policy: TargetPolicy,
}

impl Default for ChunkConfig {
    fn default() -> Self {
        ChunkConfig {
            min_words: DEFAULT_CHUNK_MIN_WORDS,
            max_words: DEFAULT_CHUNK_MAX_WORDS,
            target_policy: TargetPolicy::PerChunk,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeaturizeConfig {
    /// Abort on the first malformed corpus record instead of skipping it.
    pub strict: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProfileConfig {
    pub k: usize,
    pub standardize: bool,
    pub per_label: bool,
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub include_full: bool,
}

impl Default for ProfileConfig {
    fn default() -> Self {
        ProfileConfig {
            k: DEFAULT_K,
            standardize: true,
            per_label: false,
            restarts: 1,
            max_iter: 100,
            tol: 1e-6,
            include_full: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SelectConfig {
    pub method: u8,
    pub fraction: f64,
    pub k: usize,
    pub m: usize,
    pub standardized: bool,
    pub include_self: bool,
    /// `None` means the method's own grouping (label, domain, global).
    pub grouping: Option<Grouping>,
}

impl Default for SelectConfig {
    fn default() -> Self {
        SelectConfig {
            method: 1,
            fraction: DEFAULT_FRACTION,
            k: DEFAULT_K,
            m: DEFAULT_M,
            standardized: true,
            include_self: false,
            grouping: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FewshotConfig {
    pub per_domain: usize,
}

impl Default for FewshotConfig {
    fn default() -> Self {
        FewshotConfig {
            per_domain: DEFAULT_FEWSHOT_PER_DOMAIN,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EvaluateConfig {
    pub zero_method: ZeroMethod,
    pub wilcoxon_mode: ModeChoice,
    pub balanced_mode: BalancedMode,
}

impl Default for EvaluateConfig {
    fn default() -> Self {
        EvaluateConfig {
            zero_method: ZeroMethod::Wilcox,
            wilcoxon_mode: ModeChoice::Auto,
            balanced_mode: BalancedMode::Resample,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReportConfig {
    pub precision: usize,
}

impl Default for ReportConfig {
    fn default() -> Self {
        ReportConfig { precision: 4 }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Global seed; commands that draw random numbers refuse to run without one.
    pub seed: Option<u64>,
    /// Input and output files of the current command, keyed by role.
    pub paths: BTreeMap<String, String>,
    pub chunk: ChunkConfig,
    pub featurize: FeaturizeConfig,
    pub profile: ProfileConfig,
    pub select: SelectConfig,
    pub fewshot: FewshotConfig,
    pub evaluate: EvaluateConfig,
    pub report: ReportConfig,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing config {}", path.display()))
    }

    pub fn require_seed(&self, what: &str) -> Result<u64> {
        match self.seed {
            Some(s) => Ok(s),
            None => bail!("{what} needs an explicit seed (--seed or `seed` in the config file)"),
        }
    }
}

/// Overwrites `slot` when a flag was given.
pub fn set<T>(slot: &mut T, flag: Option<T>) {
    if let Some(v) = flag {
        *slot = v;
    }
}
