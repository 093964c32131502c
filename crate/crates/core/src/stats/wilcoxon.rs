use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::rng;
use crate::{Error, Result};

/// Largest effective sample size for which `Auto` uses the exact null distribution.
pub const EXACT_MAX_N: usize = 25;

/// Exact mode works on integer (doubled) rank sums with u64 counts.
const EXACT_HARD_LIMIT: usize = 63;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroMethod {
    /// Drop zero differences before ranking.
    Wilcox,
    /// Rank zero differences with the rest, then drop their ranks.
    Pratt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WilcoxonMode {
    Exact,
    NormalApproximation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeChoice {
    /// Exact up to [`EXACT_MAX_N`] non-zero differences, normal approximation above.
    Auto,
    Exact,
    Normal,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct WilcoxonOptions {
    pub zero_method: ZeroMethod,
    pub mode: ModeChoice,
}

impl Default for WilcoxonOptions {
    fn default() -> Self {
        WilcoxonOptions {
            zero_method: ZeroMethod::Wilcox,
            mode: ModeChoice::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WilcoxonOutcome {
    /// `min(R+, R-)`.
    pub statistic: f64,
    pub rank_sum_positive: f64,
    pub rank_sum_negative: f64,
    pub n_effective: usize,
    /// Two-sided.
    pub p_value: f64,
    pub mode: WilcoxonMode,
    /// Arithmetic mean of all differences, zeros included.
    pub mean_difference: f64,
}

/// Average ranks (1-based) of `values`, ties sharing the mean of their positions.
fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let rank = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = rank;
        }
        i = j + 1;
    }
    ranks
}

/// Two-sided exact p: share of the 2^n sign assignments whose
/// `min(R+, R-)` is at most the observed one. Ranks are doubled so that tied
/// half-ranks become integers; the count of assignments per rank sum is built
/// by subset-sum dynamic programming.
fn exact_p(doubled_ranks: &[u64], observed_doubled: u64) -> f64 {
    let total: u64 = doubled_ranks.iter().sum();
    let mut counts = vec![0u64; total as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in doubled_ranks {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] > 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let hits: u64 = counts
        .iter()
        .enumerate()
        .filter(|(s, _)| (*s as u64).min(total - *s as u64) <= observed_doubled)
        .map(|(_, c)| c)
        .sum();
    hits as f64 / 2f64.powi(doubled_ranks.len() as i32)
}

/// Normal approximation with continuity correction. Mean and variance come
/// from the actual ranks, `Σr/2` and `Σr²/4`, which folds in the tie correction.
fn normal_p(ranks: &[f64], statistic: f64) -> f64 {
    let mean: f64 = ranks.iter().sum::<f64>() / 2.0;
    let var: f64 = ranks.iter().map(|r| r * r).sum::<f64>() / 4.0;
    let num = statistic - mean + 0.5;
    if num >= 0.0 || var <= 0.0 {
        return 1.0;
    }
    let z = num / var.sqrt();
    let std_normal = Normal::standard();
    (2.0 * std_normal.cdf(z)).clamp(f64::MIN_POSITIVE, 1.0)
}

pub fn wilcoxon_signed_rank_with(diffs: &[f64], opts: &WilcoxonOptions) -> Result<WilcoxonOutcome> {
    if diffs.is_empty() {
        return Err(Error::EmptyInput("differences"));
    }
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidParameter("non-finite difference".into()));
    }
    let mean_difference = diffs.iter().sum::<f64>() / diffs.len() as f64;
    let (signed, ranks): (Vec<f64>, Vec<f64>) = match opts.zero_method {
        ZeroMethod::Wilcox => {
            let nz: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
            let abs: Vec<f64> = nz.iter().map(|d| d.abs()).collect();
            let ranks = average_ranks(&abs);
            (nz, ranks)
        }
        ZeroMethod::Pratt => {
            let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
            let ranks = average_ranks(&abs);
            diffs
                .iter()
                .zip(ranks)
                .filter(|(d, _)| **d != 0.0)
                .map(|(d, r)| (*d, r))
                .unzip()
        }
    };
    let n = signed.len();
    if n == 0 {
        return Err(Error::AllZeroDifferences);
    }
    let r_plus: f64 = signed.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();
    let r_minus: f64 = signed.iter().zip(&ranks).filter(|(d, _)| **d < 0.0).map(|(_, r)| r).sum();
    let statistic = r_plus.min(r_minus);

    let mode = match opts.mode {
        ModeChoice::Exact => WilcoxonMode::Exact,
        ModeChoice::Normal => WilcoxonMode::NormalApproximation,
        ModeChoice::Auto if n <= EXACT_MAX_N => WilcoxonMode::Exact,
        ModeChoice::Auto => WilcoxonMode::NormalApproximation,
    };
    let p_value = match mode {
        WilcoxonMode::Exact => {
            if n > EXACT_HARD_LIMIT {
                return Err(Error::InvalidParameter(format!(
                    "exact mode supports at most {EXACT_HARD_LIMIT} non-zero differences, got {n}"
                )));
            }
            let doubled: Vec<u64> = ranks.iter().map(|r| (2.0 * r).round() as u64).collect();
            exact_p(&doubled, (2.0 * statistic).round() as u64)
        }
        WilcoxonMode::NormalApproximation => normal_p(&ranks, statistic),
    };
    Ok(WilcoxonOutcome {
        statistic,
        rank_sum_positive: r_plus,
        rank_sum_negative: r_minus,
        n_effective: n,
        p_value,
        mode,
        mean_difference,
    })
}

/// Two-sided Wilcoxon signed-rank test with zero differences dropped.
pub fn wilcoxon_signed_rank(diffs: &[f64]) -> Result<WilcoxonOutcome> {
    wilcoxon_signed_rank_with(diffs, &WilcoxonOptions::default())
}

/// Two accuracy sequences evaluated at the same checkpoints.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairedAccuracySeries {
    pub steps: Vec<u64>,
    pub acc_a: Vec<f64>,
    pub acc_b: Vec<f64>,
}

impl PairedAccuracySeries {
    pub fn new(steps: Vec<u64>, acc_a: Vec<f64>, acc_b: Vec<f64>) -> Result<Self> {
        if steps.len() != acc_a.len() || acc_a.len() != acc_b.len() {
            return Err(Error::LengthMismatch(acc_a.len(), acc_b.len()));
        }
        if steps.is_empty() {
            return Err(Error::EmptyInput("accuracy series"));
        }
        if acc_a.iter().chain(&acc_b).any(|a| !(0.0..=1.0).contains(a)) {
            return Err(Error::InvalidParameter("accuracy outside [0, 1]".into()));
        }
        Ok(PairedAccuracySeries { steps, acc_a, acc_b })
    }

    /// `acc_a - acc_b` per checkpoint.
    pub fn diffs(&self) -> Vec<f64> {
        self.acc_a.iter().zip(&self.acc_b).map(|(a, b)| a - b).collect()
    }

    pub fn mean_gain(&self) -> f64 {
        let d = self.diffs();
        d.iter().sum::<f64>() / d.len() as f64
    }
}

/// Pairs several runs per arm step by step: at every checkpoint the runs of
/// arm B are shuffled and matched one-to-one with the runs of arm A, so each
/// accuracy value is used exactly once. Returns `a - b` for every pair.
pub fn pair_runs(arm_a: &[Vec<f64>], arm_b: &[Vec<f64>], seed: u64) -> Result<Vec<f64>> {
    if arm_a.is_empty() {
        return Err(Error::EmptyInput("runs"));
    }
    if arm_a.len() != arm_b.len() {
        return Err(Error::LengthMismatch(arm_a.len(), arm_b.len()));
    }
    let steps = arm_a[0].len();
    for run in arm_a.iter().chain(arm_b) {
        if run.len() != steps {
            return Err(Error::LengthMismatch(steps, run.len()));
        }
    }
    let mut rng = rng::from_seed(seed);
    let mut perm: Vec<usize> = (0..arm_b.len()).collect();
    let mut diffs = Vec::with_capacity(steps * arm_a.len());
    for t in 0..steps {
        perm.shuffle(&mut rng);
        for (i, &j) in perm.iter().enumerate() {
            diffs.push(arm_a[i][t] - arm_b[j][t]);
        }
    }
    Ok(diffs)
}
