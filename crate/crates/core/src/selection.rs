//! Reference profiles and the three candidate-selection methods.
//!
//! * Method 1 scores a candidate by its L2 distance to the reference mean of
//!   its own label and keeps the closest fraction within each label.
//! * Method 2 scores by distance to the nearest of `k` k-means representatives
//!   of the reference and keeps the closest fraction within each domain.
//! * Method 3 pools the reference rows with all other candidates, sorts the
//!   pool by distance to the candidate, and scores it by the mean position of
//!   the first `m` reference rows. Lower is better; the best fraction overall
//!   is kept.
//!
//! Distances are taken on z-scored features (reference mean and standard
//! deviation) unless standardization is switched off.

use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use rand::seq::index;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{kmeans_best_of, squared_l2, KmeansParams};
use crate::corpus::Label;
use crate::features::{mean_by_label, FeatureVector, LabeledFeatureSet, LabeledRow, FEATURE_COUNT};
use crate::rng;
use crate::{Error, Result, DEFAULT_FRACTION, DEFAULT_K, DEFAULT_M};

pub const PROFILE_FORMAT_VERSION: u32 = 1;

/// Per-component reference mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub means: FeatureVector,
    pub stds: FeatureVector,
}

impl Scaler {
    pub fn fit(set: &LabeledFeatureSet) -> Result<Self> {
        let means = set.mean()?;
        let n = set.len() as f64;
        let mut var = [0.0; FEATURE_COUNT];
        for row in &set.rows {
            for (i, v) in var.iter_mut().enumerate() {
                let d = row.features.0[i] - means.0[i];
                *v += d * d;
            }
        }
        Ok(Scaler {
            means,
            stds: FeatureVector(var.map(|v| (v / n).sqrt())),
        })
    }

    /// `(x - mean) / std`, with zero-spread components mapped to 0.
    pub fn apply(&self, v: &FeatureVector) -> FeatureVector {
        let mut out = FeatureVector::zeros();
        for i in 0..FEATURE_COUNT {
            let s = self.stds.0[i];
            out.0[i] = if s > 0.0 { (v.0[i] - self.means.0[i]) / s } else { 0.0 };
        }
        out
    }

    pub fn invert(&self, z: &FeatureVector) -> FeatureVector {
        let mut out = FeatureVector::zeros();
        for i in 0..FEATURE_COUNT {
            out.0[i] = self.means.0[i] + z.0[i] * self.stds.0[i];
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Representative {
    /// Set when representatives were clustered per label.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<Label>,
    pub center: FeatureVector,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileRow {
    pub id: String,
    pub domain: String,
    pub label: Label,
    pub features: FeatureVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfileParams {
    pub k: usize,
    pub seed: u64,
    /// Cluster in z-scored space (centers are stored back in raw units).
    pub standardize: bool,
    pub per_label: bool,
    pub restarts: usize,
    pub max_iter: usize,
    pub tol: f64,
    /// Embed every reference row, as method 3 requires.
    pub include_full: bool,
}

impl ProfileParams {
    pub fn new(seed: u64) -> Self {
        ProfileParams {
            k: DEFAULT_K,
            seed,
            standardize: true,
            per_label: false,
            restarts: 1,
            max_iter: 100,
            tol: 1e-6,
            include_full: false,
        }
    }
}

/// Shareable summary of a reference feature set. Without `full_matrix` it
/// carries only aggregate statistics and cluster centers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReferenceProfile {
    pub format_version: u32,
    pub n_rows: usize,
    pub label_counts: BTreeMap<Label, usize>,
    pub label_means: BTreeMap<Label, FeatureVector>,
    pub feature_means: FeatureVector,
    pub feature_stds: FeatureVector,
    pub params: ProfileParams,
    pub representatives: Vec<Representative>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_matrix: Option<Vec<ProfileRow>>,
}

impl ReferenceProfile {
    pub fn scaler(&self) -> Scaler {
        Scaler {
            means: self.feature_means,
            stds: self.feature_stds,
        }
    }

    pub fn full_set(&self) -> Result<LabeledFeatureSet> {
        let rows = self
            .full_matrix
            .as_ref()
            .ok_or(Error::ProfileIncomplete("full reference matrix (build it with --full)"))?;
        LabeledFeatureSet::new(
            rows.iter()
                .map(|r| LabeledRow {
                    id: r.id.clone(),
                    domain: r.domain.clone(),
                    label: r.label,
                    features: r.features,
                    degenerate: Default::default(),
                })
                .collect(),
        )
    }

    /// Drops the per-row matrix, leaving the aggregate-only form.
    pub fn without_full_matrix(&self) -> Self {
        ReferenceProfile {
            full_matrix: None,
            params: ProfileParams {
                include_full: false,
                ..self.params
            },
            ..self.clone()
        }
    }
}

fn cluster(points: &[FeatureVector], params: &ProfileParams, seed: u64) -> Result<Vec<FeatureVector>> {
    let kp = KmeansParams {
        k: params.k,
        seed,
        max_iter: params.max_iter,
        tol: params.tol,
    };
    let result = kmeans_best_of(points, &kp, params.restarts)?;
    Ok(result
        .centers
        .into_iter()
        .map(|c| FeatureVector(c.try_into().expect("centers have feature dimension")))
        .collect())
}

/// Summarizes the reference: overall and per-label means, spreads, and `k`
/// k-means++ representatives (over all rows, or per label).
pub fn build_profile(reference: &LabeledFeatureSet, params: &ProfileParams) -> Result<ReferenceProfile> {
    if reference.is_empty() {
        return Err(Error::EmptyInput("reference feature set"));
    }
    let scaler = Scaler::fit(reference)?;
    let space = |v: &FeatureVector| if params.standardize { scaler.apply(v) } else { *v };
    let back = |v: FeatureVector| if params.standardize { scaler.invert(&v) } else { v };

    let mut representatives = Vec::new();
    if params.per_label {
        for label in mean_by_label(reference).keys() {
            let points: Vec<FeatureVector> = reference
                .rows
                .iter()
                .filter(|r| r.label == *label)
                .map(|r| space(&r.features))
                .collect();
            let seed = rng::derive_seed(params.seed, &format!("label-{label}"));
            for c in cluster(&points, params, seed)? {
                representatives.push(Representative {
                    label: Some(*label),
                    center: back(c),
                });
            }
        }
    } else {
        let points: Vec<FeatureVector> = reference.rows.iter().map(|r| space(&r.features)).collect();
        for c in cluster(&points, params, params.seed)? {
            representatives.push(Representative {
                label: None,
                center: back(c),
            });
        }
    }

    let mut label_counts = BTreeMap::new();
    for r in &reference.rows {
        *label_counts.entry(r.label).or_insert(0) += 1;
    }
    let full_matrix = params.include_full.then(|| {
        reference
            .rows
            .iter()
            .map(|r| ProfileRow {
                id: r.id.clone(),
                domain: r.domain.clone(),
                label: r.label,
                features: r.features,
            })
            .collect()
    });
    Ok(ReferenceProfile {
        format_version: PROFILE_FORMAT_VERSION,
        n_rows: reference.len(),
        label_counts,
        label_means: mean_by_label(reference),
        feature_means: scaler.means,
        feature_stds: scaler.stds,
        params: *params,
        representatives,
        full_matrix,
    })
}

/// Z-scores every row with the profile's overall reference mean and spread.
pub fn standardize(features: &LabeledFeatureSet, profile: &ReferenceProfile) -> LabeledFeatureSet {
    let scaler = profile.scaler();
    LabeledFeatureSet {
        rows: features
            .rows
            .iter()
            .map(|r| LabeledRow {
                features: scaler.apply(&r.features),
                ..r.clone()
            })
            .collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Grouping {
    Label,
    Domain,
    Global,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(into = "u8", try_from = "u8")]
pub enum Method {
    LabelMean,
    NearestRepresentative,
    ReferenceRank,
}

impl Method {
    pub fn number(self) -> u8 {
        match self {
            Method::LabelMean => 1,
            Method::NearestRepresentative => 2,
            Method::ReferenceRank => 3,
        }
    }

    pub fn default_grouping(self) -> Grouping {
        match self {
            Method::LabelMean => Grouping::Label,
            Method::NearestRepresentative => Grouping::Domain,
            Method::ReferenceRank => Grouping::Global,
        }
    }
}

impl From<Method> for u8 {
    fn from(m: Method) -> u8 {
        m.number()
    }
}

impl TryFrom<u8> for Method {
    type Error = Error;

    fn try_from(n: u8) -> Result<Self> {
        match n {
            1 => Ok(Method::LabelMean),
            2 => Ok(Method::NearestRepresentative),
            3 => Ok(Method::ReferenceRank),
            _ => Err(Error::InvalidParameter(format!("unknown selection method {n}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SelectionParams {
    pub fraction: f64,
    pub k: usize,
    pub m: usize,
    pub standardized: bool,
    pub grouping: Grouping,
    /// Method 3 only: keep the query candidate itself in the pool.
    pub include_self: bool,
    /// Seed the profile's representatives were built with.
    pub seed: u64,
}

impl SelectionParams {
    pub fn for_method(method: Method, seed: u64) -> Self {
        SelectionParams {
            fraction: DEFAULT_FRACTION,
            k: DEFAULT_K,
            m: DEFAULT_M,
            standardized: true,
            grouping: method.default_grouping(),
            include_self: false,
            seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredCandidate {
    pub id: String,
    pub domain: String,
    pub label: Label,
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionResult {
    pub method: Method,
    pub params: SelectionParams,
    /// One entry per candidate, in candidate order.
    pub scores: Vec<ScoredCandidate>,
    /// Chosen ids, best score first (ties by id).
    pub selected_ids: Vec<String>,
}

/// `ceil(fraction * n)`, at least 1 for a non-empty group.
pub fn quota(n: usize, fraction: f64) -> usize {
    if n == 0 {
        return 0;
    }
    // absorb representation error, e.g. 0.05 * 60 = 3.0000000000000004
    let q = (fraction * n as f64 - 1e-9).ceil().max(1.0) as usize;
    q.min(n)
}

fn by_score_then_id(a: &ScoredCandidate, b: &ScoredCandidate) -> Ordering {
    a.score.total_cmp(&b.score).then_with(|| a.id.cmp(&b.id))
}

/// Applies the per-group quota and returns the chosen ids, best first.
pub fn apply_quota(scores: &[ScoredCandidate], grouping: Grouping, fraction: f64) -> Vec<String> {
    let mut groups: BTreeMap<String, Vec<&ScoredCandidate>> = BTreeMap::new();
    for s in scores {
        let key = match grouping {
            Grouping::Label => s.label.to_string(),
            Grouping::Domain => s.domain.clone(),
            Grouping::Global => String::new(),
        };
        groups.entry(key).or_default().push(s);
    }
    let mut chosen: Vec<&ScoredCandidate> = Vec::new();
    for members in groups.values_mut() {
        members.sort_by(|a, b| by_score_then_id(a, b));
        chosen.extend(members.iter().take(quota(members.len(), fraction)));
    }
    chosen.sort_by(|a, b| by_score_then_id(a, b));
    chosen.into_iter().map(|s| s.id.clone()).collect()
}

fn check_fraction(fraction: f64) -> Result<()> {
    if fraction > 0.0 && fraction <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("fraction {fraction} outside (0, 1]")))
    }
}

fn l2(a: &FeatureVector, b: &FeatureVector) -> f64 {
    squared_l2(&a.0, &b.0).sqrt()
}

fn finish(
    method: Method,
    params: SelectionParams,
    cand: &LabeledFeatureSet,
    scores: Vec<f64>,
) -> SelectionResult {
    let scores: Vec<ScoredCandidate> = cand
        .rows
        .iter()
        .zip(scores)
        .map(|(r, score)| ScoredCandidate {
            id: r.id.clone(),
            domain: r.domain.clone(),
            label: r.label,
            score,
        })
        .collect();
    let selected_ids = apply_quota(&scores, params.grouping, params.fraction);
    SelectionResult {
        method,
        params,
        scores,
        selected_ids,
    }
}

fn projector(profile: &ReferenceProfile, standardized: bool) -> impl Fn(&FeatureVector) -> FeatureVector + Sync {
    let scaler = profile.scaler();
    move |v| if standardized { scaler.apply(v) } else { *v }
}

/// Method 1: distance to the reference mean of the candidate's label.
pub fn select_method1(
    profile: &ReferenceProfile,
    cand: &LabeledFeatureSet,
    params: SelectionParams,
) -> Result<SelectionResult> {
    check_fraction(params.fraction)?;
    let project = projector(profile, params.standardized);
    let mut targets = BTreeMap::new();
    for row in &cand.rows {
        if let Entry::Vacant(slot) = targets.entry(row.label) {
            let mean = profile
                .label_means
                .get(&row.label)
                .ok_or(Error::LabelMissing(row.label))?;
            slot.insert(project(mean));
        }
    }
    let scores = cand
        .rows
        .par_iter()
        .map(|r| l2(&project(&r.features), &targets[&r.label]))
        .collect();
    Ok(finish(Method::LabelMean, params, cand, scores))
}

/// Method 2: distance to the nearest reference representative. Representatives
/// clustered per label only compete for candidates of that label.
pub fn select_method2(
    profile: &ReferenceProfile,
    cand: &LabeledFeatureSet,
    params: SelectionParams,
) -> Result<SelectionResult> {
    check_fraction(params.fraction)?;
    if profile.representatives.is_empty() {
        return Err(Error::ProfileIncomplete("representatives"));
    }
    if params.k != profile.params.k {
        return Err(Error::InvalidParameter(format!(
            "k = {} but the profile was clustered with k = {}",
            params.k, profile.params.k
        )));
    }
    let project = projector(profile, params.standardized);
    let reps: Vec<(Option<Label>, FeatureVector)> = profile
        .representatives
        .iter()
        .map(|r| (r.label, project(&r.center)))
        .collect();
    let scores = cand
        .rows
        .par_iter()
        .map(|row| {
            let x = project(&row.features);
            reps.iter()
                .filter(|(l, _)| l.is_none_or(|l| l == row.label))
                .map(|(_, c)| l2(&x, c))
                .min_by(f64::total_cmp)
                .ok_or(Error::LabelMissing(row.label))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(finish(Method::NearestRepresentative, params, cand, scores))
}

/// Mean 0-based position of the first `m` reference rows when the reference
/// rows and the other candidates are sorted by distance to candidate `a`.
/// Equal distances place reference rows before candidates, so only
/// candidates strictly closer than a reference row push it back.
fn rank_score(
    a: usize,
    cand: &[FeatureVector],
    reference: &[(String, FeatureVector)],
    m: usize,
    include_self: bool,
) -> f64 {
    let x = &cand[a];
    let mut ref_d: Vec<(f64, &str)> = reference
        .iter()
        .map(|(id, v)| (l2(x, v), id.as_str()))
        .collect();
    ref_d.sort_by(|p, q| p.0.total_cmp(&q.0).then_with(|| p.1.cmp(q.1)));
    let cand_d: Vec<f64> = cand
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != a)
        .map(|(_, v)| l2(x, v))
        .collect();
    let total: usize = ref_d[..m]
        .iter()
        .enumerate()
        .map(|(j, (d, _))| {
            let closer = cand_d.iter().filter(|c| *c < d).count();
            let self_before = usize::from(include_self && *d > 0.0);
            j + closer + self_before
        })
        .sum();
    total as f64 / m as f64
}

/// Method 3: rank of the nearest reference rows among reference and candidates.
pub fn select_method3(
    profile: &ReferenceProfile,
    cand: &LabeledFeatureSet,
    params: SelectionParams,
) -> Result<SelectionResult> {
    check_fraction(params.fraction)?;
    let full = profile.full_set()?;
    if params.m == 0 || params.m > full.len() {
        return Err(Error::InvalidParameter(format!(
            "m = {} must lie in 1..={} (reference size)",
            params.m,
            full.len()
        )));
    }
    let project = projector(profile, params.standardized);
    let reference: Vec<(String, FeatureVector)> = full
        .rows
        .iter()
        .map(|r| (r.id.clone(), project(&r.features)))
        .collect();
    let cand_vecs: Vec<FeatureVector> = cand.rows.iter().map(|r| project(&r.features)).collect();
    let scores = (0..cand_vecs.len())
        .into_par_iter()
        .map(|a| rank_score(a, &cand_vecs, &reference, params.m, params.include_self))
        .collect();
    Ok(finish(Method::ReferenceRank, params, cand, scores))
}

pub fn select(
    method: Method,
    profile: &ReferenceProfile,
    cand: &LabeledFeatureSet,
    params: SelectionParams,
) -> Result<SelectionResult> {
    if cand.is_empty() {
        return Err(Error::EmptyInput("candidate feature set"));
    }
    match method {
        Method::LabelMean => select_method1(profile, cand, params),
        Method::NearestRepresentative => select_method2(profile, cand, params),
        Method::ReferenceRank => select_method3(profile, cand, params),
    }
}

/// Draws up to `per_domain` selected ids from every domain, uniformly without
/// replacement. Domains come out in sorted order; within a domain the ids keep
/// their selection order.
pub fn sample_fewshot(selection: &SelectionResult, per_domain: usize, seed: u64) -> Result<Vec<String>> {
    if selection.selected_ids.is_empty() {
        return Err(Error::EmptyInput("selection"));
    }
    let domain_of: BTreeMap<&str, &str> = selection
        .scores
        .iter()
        .map(|s| (s.id.as_str(), s.domain.as_str()))
        .collect();
    let mut by_domain: BTreeMap<&str, Vec<&str>> = BTreeMap::new();
    for id in &selection.selected_ids {
        let domain = domain_of
            .get(id.as_str())
            .ok_or_else(|| Error::InvalidParameter(format!("selected id `{id}` has no score entry")))?;
        by_domain.entry(domain).or_default().push(id);
    }
    let mut rng = rng::from_seed(seed);
    let mut out = Vec::new();
    for ids in by_domain.values() {
        let amount = per_domain.min(ids.len());
        let mut picked = index::sample(&mut rng, ids.len(), amount).into_vec();
        picked.sort_unstable();
        out.extend(picked.into_iter().map(|i| ids[i].to_string()));
    }
    Ok(out)
}
