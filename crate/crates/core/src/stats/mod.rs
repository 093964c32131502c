//! Evaluation statistics: paired Wilcoxon signed-rank test over accuracy
//! series, agreement metrics over graded labels, and feature-mean difference
//! tables.

mod agreement;
mod report;
mod wilcoxon;

pub use agreement::{balanced_accuracy, quadratic_weighted_kappa, BalancedMode};
pub use report::{feature_mean_diff_report, MeanDiffReport, ReportRow};
pub use wilcoxon::{
    pair_runs, wilcoxon_signed_rank, wilcoxon_signed_rank_with, ModeChoice, PairedAccuracySeries,
    WilcoxonMode, WilcoxonOptions, WilcoxonOutcome, ZeroMethod, EXACT_MAX_N,
};
