use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::features::{Feature, FeatureVector, LabeledFeatureSet};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportRow {
    pub feature: String,
    pub label: String,
    pub diffs: Vec<f64>,
}

/// Absolute differences between reference feature means and the means of one
/// or more other datasets, one row per feature in canonical order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanDiffReport {
    pub columns: Vec<String>,
    pub rows: Vec<ReportRow>,
}

/// `reference_means` is either a profile's `feature_means` or the mean of a
/// reference feature set.
pub fn feature_mean_diff_report(
    reference_means: &FeatureVector,
    others: &[(&str, &LabeledFeatureSet)],
) -> Result<MeanDiffReport> {
    if others.is_empty() {
        return Err(Error::EmptyInput("datasets to compare"));
    }
    let means = others
        .iter()
        .map(|(_, set)| set.mean())
        .collect::<Result<Vec<_>>>()?;
    let rows = Feature::ALL
        .into_iter()
        .map(|f| ReportRow {
            feature: f.name().to_string(),
            label: f.label().to_string(),
            diffs: means.iter().map(|m| (reference_means[f] - m[f]).abs()).collect(),
        })
        .collect();
    Ok(MeanDiffReport {
        columns: others.iter().map(|(name, _)| name.to_string()).collect(),
        rows,
    })
}

impl MeanDiffReport {
    /// Markdown table with values rounded to `precision` decimals.
    pub fn to_markdown(&self, precision: usize) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "| feature | {} |", self.columns.join(" | "));
        let _ = writeln!(out, "|---|{}", "---:|".repeat(self.columns.len()));
        for row in &self.rows {
            let cells: Vec<String> = row.diffs.iter().map(|d| format!("{d:.precision$}")).collect();
            let _ = writeln!(out, "| {} | {} |", row.label, cells.join(" | "));
        }
        out
    }
}
