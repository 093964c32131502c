//! Lloyd's k-means with k-means++ seeding.

use std::collections::HashSet;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::rng::{self, SeededRng};
use crate::{Error, Result};

pub fn squared_l2(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn distinct_count<P: AsRef<[f64]>>(points: &[P]) -> usize {
    points
        .iter()
        // `+ 0.0` folds -0.0 into 0.0
        .map(|p| p.as_ref().iter().map(|v| (v + 0.0).to_bits()).collect::<Vec<_>>())
        .collect::<HashSet<_>>()
        .len()
}

fn check_k<P: AsRef<[f64]>>(points: &[P], k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let distinct = distinct_count(points);
    if k > distinct {
        return Err(Error::TooFewPoints { k, distinct });
    }
    Ok(())
}

/// Index of the nearest center and the squared distance to it; ties go to the lowest index.
pub fn nearest(point: &[f64], centers: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (j, c) in centers.iter().enumerate() {
        let d = squared_l2(point, c);
        if d < best.1 {
            best = (j, d);
        }
    }
    best
}

/// k-means++ seeding: the first center is a uniformly drawn point, each further
/// center is drawn with probability proportional to its squared distance to the
/// nearest center chosen so far.
pub fn kmeans_pp_init_with<P: AsRef<[f64]>>(
    points: &[P],
    k: usize,
    rng: &mut SeededRng,
) -> Result<Vec<Vec<f64>>> {
    check_k(points, k)?;
    let n = points.len();
    let first = rng.random_range(0..n);
    let mut centers = vec![points[first].as_ref().to_vec()];
    let mut weights: Vec<f64> = points
        .iter()
        .map(|p| squared_l2(p.as_ref(), &centers[0]))
        .collect();
    while centers.len() < k {
        let total: f64 = weights.iter().sum();
        let target = rng.random::<f64>() * total;
        let mut acc = 0.0;
        let mut pick = None;
        for (i, &w) in weights.iter().enumerate() {
            if w <= 0.0 {
                continue;
            }
            acc += w;
            pick = Some(i);
            if acc > target {
                break;
            }
        }
        // k <= distinct points guarantees some positive weight remains
        let pick = pick.expect("positive D² weight");
        let center = points[pick].as_ref().to_vec();
        for (w, p) in weights.iter_mut().zip(points) {
            *w = w.min(squared_l2(p.as_ref(), &center));
        }
        centers.push(center);
    }
    Ok(centers)
}

pub fn kmeans_pp_init<P: AsRef<[f64]>>(points: &[P], k: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    kmeans_pp_init_with(points, k, &mut rng::from_seed(seed))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KmeansParams {
    pub k: usize,
    pub seed: u64,
    pub max_iter: usize,
    pub tol: f64,
}

impl KmeansParams {
    pub fn new(k: usize, seed: u64) -> Self {
        KmeansParams {
            k,
            seed,
            max_iter: 100,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KmeansResult {
    pub centers: Vec<Vec<f64>>,
    pub assignments: Vec<usize>,
    pub inertia: f64,
    /// Number of center updates performed.
    pub iterations: usize,
    /// Inertia after each assignment step, ending with the final one.
    pub inertia_history: Vec<f64>,
}

fn assign<P: AsRef<[f64]> + Sync>(points: &[P], centers: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>) {
    points
        .par_iter()
        .map(|p| nearest(p.as_ref(), centers))
        .unzip()
}

fn update<P: AsRef<[f64]>>(
    points: &[P],
    centers: &[Vec<f64>],
    assignments: &[usize],
    dists: &[f64],
) -> Vec<Vec<f64>> {
    let dim = centers[0].len();
    let k = centers.len();
    let mut sums = vec![vec![0.0; dim]; k];
    let mut counts = vec![0usize; k];
    for (p, &a) in points.iter().zip(assignments) {
        counts[a] += 1;
        for (s, v) in sums[a].iter_mut().zip(p.as_ref()) {
            *s += v;
        }
    }
    let mut available: Vec<f64> = dists.to_vec();
    for j in 0..k {
        if counts[j] > 0 {
            let c = counts[j] as f64;
            sums[j].iter_mut().for_each(|s| *s /= c);
            continue;
        }
        // empty cluster: reseed at the point farthest from its assigned center
        let mut far = 0;
        for (i, &d) in available.iter().enumerate() {
            if d > available[far] {
                far = i;
            }
        }
        sums[j] = points[far].as_ref().to_vec();
        available[far] = f64::NEG_INFINITY;
    }
    sums
}

/// Lloyd iterations from a k-means++ start until no center moves by `tol` or
/// more (Euclidean), or `max_iter` updates have run.
pub fn kmeans<P: AsRef<[f64]> + Sync>(points: &[P], params: &KmeansParams) -> Result<KmeansResult> {
    if params.max_iter == 0 || params.tol.is_nan() || params.tol < 0.0 {
        return Err(Error::InvalidParameter(
            "k-means needs max_iter >= 1 and tol >= 0".into(),
        ));
    }
    let mut centers = kmeans_pp_init(points, params.k, params.seed)?;
    let mut history: Vec<f64> = Vec::new();
    let mut iterations = 0;
    loop {
        let (assignments, dists) = assign(points, &centers);
        let inertia: f64 = dists.iter().sum();
        if let Some(&prev) = history.last() {
            debug_assert!(
                inertia <= prev + 1e-9 * prev.max(1.0),
                "inertia increased: {prev} -> {inertia}"
            );
        }
        history.push(inertia);
        if iterations == params.max_iter {
            return Ok(KmeansResult {
                centers,
                assignments,
                inertia,
                iterations,
                inertia_history: history,
            });
        }
        let next = update(points, &centers, &assignments, &dists);
        let shift = centers
            .iter()
            .zip(&next)
            .map(|(a, b)| squared_l2(a, b).sqrt())
            .fold(0.0, f64::max);
        centers = next;
        iterations += 1;
        if shift < params.tol {
            let (assignments, dists) = assign(points, &centers);
            let inertia = dists.iter().sum();
            history.push(inertia);
            return Ok(KmeansResult {
                centers,
                assignments,
                inertia,
                iterations,
                inertia_history: history,
            });
        }
    }
}

/// Runs k-means `restarts` times and keeps the lowest-inertia result (first wins ties).
/// Restart 0 uses `params.seed` itself.
pub fn kmeans_best_of<P: AsRef<[f64]> + Sync>(
    points: &[P],
    params: &KmeansParams,
    restarts: usize,
) -> Result<KmeansResult> {
    let mut best: Option<KmeansResult> = None;
    for r in 0..restarts.max(1) {
        let seed = if r == 0 {
            params.seed
        } else {
            rng::derive_seed(params.seed, &format!("restart-{r}"))
        };
        let result = kmeans(points, &KmeansParams { seed, ..*params })?;
        if best.as_ref().is_none_or(|b| result.inertia < b.inertia) {
            best = Some(result);
        }
    }
    Ok(best.expect("at least one restart"))
}
