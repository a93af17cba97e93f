//! Fuzzy clustering of per-user score trajectories across snapshots.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::eval::{normalize_scores, NormalizeMethod};
use crate::event::NodeId;
use crate::rank::RankVector;

/// Score trajectory of one node across a snapshot sequence, with its
/// standardized (mean 0, sd 1) copy used for clustering.
#[derive(Debug, Clone, Serialize)]
pub struct ScoreTimeSeries {
    pub node: NodeId,
    pub scores: Vec<f64>,
    pub standardized: Vec<f64>,
}

/// Assemble score trajectories from per-snapshot rankings.
///
/// Each ranking is normalized first so scores are comparable across snapshot
/// sizes. Candidates present in fewer than `min_presence` of the snapshots
/// are dropped; remaining gaps are filled by linear interpolation (nearest
/// value at the edges). Zero-variance trajectories cannot be standardized and
/// are skipped with a warning.
pub fn build_score_series(
    ranks: &[RankVector],
    candidates: &[NodeId],
    min_presence: f64,
    method: NormalizeMethod,
) -> Vec<ScoreTimeSeries> {
    let normalized: Vec<RankVector> = ranks.iter().map(|r| normalize_scores(r, method)).collect();
    let len = normalized.len();
    let mut out = Vec::new();
    for &node in candidates {
        let raw: Vec<Option<f64>> = normalized.iter().map(|r| r.score(node)).collect();
        let present = raw.iter().filter(|s| s.is_some()).count();
        if len == 0 || (present as f64) < min_presence * len as f64 || present == 0 {
            continue;
        }
        let scores = interpolate(&raw);
        match standardize(&scores) {
            Some(standardized) => out.push(ScoreTimeSeries {
                node,
                scores,
                standardized,
            }),
            None => {
                log::warn!("skipping zero-variance score series for node {node}");
            }
        }
    }
    out
}

fn interpolate(values: &[Option<f64>]) -> Vec<f64> {
    let n = values.len();
    let mut out = vec![0.0; n];
    let known: Vec<usize> = (0..n).filter(|&i| values[i].is_some()).collect();
    for i in 0..n {
        out[i] = match values[i] {
            Some(v) => v,
            None => {
                let next = known.iter().copied().find(|&k| k > i);
                let prev = known.iter().copied().rev().find(|&k| k < i);
                match (prev, next) {
                    (Some(p), Some(q)) => {
                        let vp = values[p].unwrap();
                        let vq = values[q].unwrap();
                        vp + (vq - vp) * (i - p) as f64 / (q - p) as f64
                    }
                    (Some(p), None) => values[p].unwrap(),
                    (None, Some(q)) => values[q].unwrap(),
                    (None, None) => unreachable!("present > 0 guaranteed"),
                }
            }
        };
    }
    out
}

fn standardize(values: &[f64]) -> Option<Vec<f64>> {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    if var == 0.0 {
        return None;
    }
    let sd = var.sqrt();
    Some(values.iter().map(|v| (v - mean) / sd).collect())
}

/// Fuzzy c-means parameters.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct FcmParams {
    pub clusters: usize,
    /// Fuzzifier `m > 1`; closer to 1 gives crisper memberships.
    pub fuzzifier: f64,
    /// Stop when the objective improves by less than this.
    pub tolerance: f64,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for FcmParams {
    fn default() -> Self {
        FcmParams {
            clusters: 4,
            fuzzifier: 1.25,
            tolerance: 1e-9,
            max_iter: 200,
            seed: 0,
        }
    }
}

/// Result of the fuzzy clustering: per-series memberships (rows sum to 1),
/// centroids in the standardized space, and the final objective value.
#[derive(Debug, Clone, Serialize)]
pub struct FuzzyClustering {
    pub memberships: Vec<Vec<f64>>,
    pub centroids: Vec<Vec<f64>>,
    pub objective: f64,
    pub iterations: usize,
    /// Objective value after each iteration; non-increasing.
    pub objective_trace: Vec<f64>,
}

impl FuzzyClustering {
    /// Index of the strongest cluster for each series.
    pub fn hard_assignments(&self) -> Vec<usize> {
        self.memberships
            .iter()
            .map(|row| {
                row.iter()
                    .enumerate()
                    .max_by(|a, b| a.1.total_cmp(b.1))
                    .map(|(j, _)| j)
                    .unwrap_or(0)
            })
            .collect()
    }
}

/// Standard fuzzy c-means on the standardized trajectories, minimizing the
/// membership-weighted squared error. Deterministic for a fixed seed.
pub fn cluster_lurking_series(
    series: &[ScoreTimeSeries],
    params: &FcmParams,
) -> Result<FuzzyClustering> {
    let n = series.len();
    let bad = |field: &'static str, msg: String| Err(Error::InvalidParameter { field, msg });
    if params.clusters < 2 {
        return bad("clusters", "need at least 2 clusters".into());
    }
    if params.clusters >= n {
        return bad(
            "clusters",
            format!("{} clusters require more than {} series", params.clusters, n),
        );
    }
    if params.fuzzifier.is_nan() || params.fuzzifier <= 1.0 {
        return bad("fuzzifier", "must be greater than 1".into());
    }
    if params.tolerance.is_nan() || params.tolerance <= 0.0 {
        return bad("tolerance", "must be positive".into());
    }
    let dim = series[0].standardized.len();
    if dim < 2 {
        return bad("series", "trajectories must have length at least 2".into());
    }
    if series.iter().any(|s| s.standardized.len() != dim) {
        return bad("series", "trajectories must share one length".into());
    }

    let data: Vec<&[f64]> = series.iter().map(|s| s.standardized.as_slice()).collect();
    let c = params.clusters;
    let m = params.fuzzifier;

    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut memberships: Vec<Vec<f64>> = (0..n)
        .map(|_| {
            let mut row: Vec<f64> = (0..c).map(|_| rng.gen::<f64>().max(1e-9)).collect();
            let total: f64 = row.iter().sum();
            row.iter_mut().for_each(|u| *u /= total);
            row
        })
        .collect();

    let mut centroids = vec![vec![0.0; dim]; c];
    let mut objective = f64::INFINITY;
    let mut trace = Vec::new();
    let mut iterations = 0usize;

    while iterations < params.max_iter {
        iterations += 1;
        // Centroid update from m-powered memberships.
        for (j, centroid) in centroids.iter_mut().enumerate() {
            centroid.iter_mut().for_each(|x| *x = 0.0);
            let mut weight_sum = 0.0;
            for i in 0..n {
                let w = memberships[i][j].powf(m);
                weight_sum += w;
                for (d, x) in data[i].iter().enumerate() {
                    centroid[d] += w * x;
                }
            }
            if weight_sum > 0.0 {
                centroid.iter_mut().for_each(|x| *x /= weight_sum);
            }
        }
        // Membership update from squared distances.
        let mut dist2 = vec![vec![0.0f64; c]; n];
        for i in 0..n {
            for j in 0..c {
                dist2[i][j] = data[i]
                    .iter()
                    .zip(centroids[j].iter())
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum();
            }
        }
        for i in 0..n {
            let zeros: Vec<usize> = (0..c).filter(|&j| dist2[i][j] == 0.0).collect();
            if !zeros.is_empty() {
                memberships[i].iter_mut().for_each(|u| *u = 0.0);
                let share = 1.0 / zeros.len() as f64;
                for j in zeros {
                    memberships[i][j] = share;
                }
                continue;
            }
            let exponent = 1.0 / (m - 1.0);
            for j in 0..c {
                let denom: f64 = (0..c)
                    .map(|k| (dist2[i][j] / dist2[i][k]).powf(exponent))
                    .sum();
                memberships[i][j] = 1.0 / denom;
            }
        }
        // Objective under the just-updated memberships and centroids.
        let mut next_objective = 0.0;
        for i in 0..n {
            for j in 0..c {
                next_objective += memberships[i][j].powf(m) * dist2[i][j];
            }
        }
        trace.push(next_objective);
        let improved = objective - next_objective;
        objective = next_objective;
        if improved.abs() < params.tolerance {
            break;
        }
    }

    Ok(FuzzyClustering {
        memberships,
        centroids,
        objective,
        iterations,
        objective_trace: trace,
    })
}
