use std::collections::HashMap;

use rand::seq::index;
use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::rng;
use crate::{Error, Result};

fn positions(labels: &[Label], categories: &[Label]) -> Result<Vec<usize>> {
    let lookup: HashMap<Label, usize> = categories.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    labels
        .iter()
        .map(|l| {
            lookup
                .get(l)
                .copied()
                .ok_or_else(|| Error::InvalidParameter(format!("label {l} not among categories {categories:?}")))
        })
        .collect()
}

/// Cohen's kappa with quadratic weights `(i - j)^2 / (K - 1)^2` over the
/// ordered `categories`. Errors when the expected weighted disagreement is 0.
pub fn quadratic_weighted_kappa(y_true: &[Label], y_pred: &[Label], categories: &[Label]) -> Result<f64> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch(y_true.len(), y_pred.len()));
    }
    if y_true.is_empty() {
        return Err(Error::EmptyInput("label pairs"));
    }
    let k = categories.len();
    if k < 2 {
        return Err(Error::InvalidParameter("kappa needs at least two categories".into()));
    }
    let t = positions(y_true, categories)?;
    let p = positions(y_pred, categories)?;
    let mut observed = vec![vec![0.0; k]; k];
    for (&i, &j) in t.iter().zip(&p) {
        observed[i][j] += 1.0;
    }
    let n = y_true.len() as f64;
    let row: Vec<f64> = observed.iter().map(|r| r.iter().sum()).collect();
    let col: Vec<f64> = (0..k).map(|j| observed.iter().map(|r| r[j]).sum()).collect();
    let denom_w = ((k - 1) * (k - 1)) as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..k {
        for j in 0..k {
            let w = ((i as f64 - j as f64).powi(2)) / denom_w;
            num += w * observed[i][j];
            den += w * row[i] * col[j] / n;
        }
    }
    if den == 0.0 {
        return Err(Error::DegenerateKappa);
    }
    Ok(1.0 - num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BalancedMode {
    /// Downsample every class to the minority count, then plain accuracy.
    Resample,
    /// Mean per-class recall.
    Macro,
}

/// Accuracy on a class-balanced view of the data.
///
/// Resampling draws from each class's pairs after sorting them by prediction,
/// so the value depends only on the multiset of pairs per class and the seed.
pub fn balanced_accuracy(
    y_true: &[Label],
    y_pred: &[Label],
    categories: &[Label],
    seed: u64,
    mode: BalancedMode,
) -> Result<f64> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch(y_true.len(), y_pred.len()));
    }
    if y_true.is_empty() {
        return Err(Error::EmptyInput("label pairs"));
    }
    positions(y_true, categories)?;
    let per_class: Vec<(Label, Vec<Label>)> = categories
        .iter()
        .map(|&c| {
            let mut preds: Vec<Label> = y_true
                .iter()
                .zip(y_pred)
                .filter(|(t, _)| **t == c)
                .map(|(_, p)| *p)
                .collect();
            preds.sort_unstable();
            (c, preds)
        })
        .collect();
    match mode {
        BalancedMode::Macro => {
            let recalls: Vec<f64> = per_class
                .iter()
                .filter(|(_, preds)| !preds.is_empty())
                .map(|(c, preds)| preds.iter().filter(|p| *p == c).count() as f64 / preds.len() as f64)
                .collect();
            Ok(recalls.iter().sum::<f64>() / recalls.len() as f64)
        }
        BalancedMode::Resample => {
            if let Some((c, _)) = per_class.iter().find(|(_, preds)| preds.is_empty()) {
                return Err(Error::EmptyClass(*c));
            }
            let minority = per_class.iter().map(|(_, p)| p.len()).min().expect("non-empty categories");
            let mut rng = rng::from_seed(seed);
            let mut correct = 0usize;
            for (c, preds) in &per_class {
                for i in index::sample(&mut rng, preds.len(), minority) {
                    if preds[i] == *c {
                        correct += 1;
                    }
                }
            }
            Ok(correct as f64 / (minority * per_class.len()) as f64)
        }
    }
}
