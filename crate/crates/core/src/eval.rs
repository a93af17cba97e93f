//! Ranking evaluation: the action-count reference ranking and rank-list
//! comparison metrics.

use std::collections::{HashMap, HashSet};

use crate::error::{Error, Result};
use crate::event::{ActionKind, EventLog, NodeId};
use crate::rank::{Algorithm, RankVector};
use crate::snapshot::SnapshotGraph;

/// Total order over a snapshot's nodes, descending by score with ties broken
/// by node id.
#[derive(Debug, Clone)]
pub struct RankingList {
    pub algorithm: Algorithm,
    nodes: Vec<NodeId>,
}

impl RankingList {
    pub fn from_vector(vector: &RankVector) -> Self {
        RankingList {
            algorithm: vector.algorithm,
            nodes: vector.sorted_entries().into_iter().map(|(n, _)| n).collect(),
        }
    }

    pub fn from_nodes(algorithm: Algorithm, nodes: Vec<NodeId>) -> Self {
        RankingList { algorithm, nodes }
    }

    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The top `ceil(frac * len)` nodes.
    pub fn top_fraction(&self, frac: f64) -> &[NodeId] {
        let k = ((frac * self.nodes.len() as f64).ceil() as usize).min(self.nodes.len());
        &self.nodes[..k]
    }

    /// The bottom `ceil(frac * len)` nodes.
    pub fn bottom_fraction(&self, frac: f64) -> &[NodeId] {
        let k = ((frac * self.nodes.len() as f64).ceil() as usize).min(self.nodes.len());
        &self.nodes[self.nodes.len() - k..]
    }
}

/// Which consumption kinds feed the reference-ranking numerator.
#[derive(Debug, Clone, Copy, Default)]
pub struct DdConfig {
    /// Count comments alongside favorites and likes.
    pub include_comments: bool,
}

fn dd_counts_kind(kind: ActionKind, cfg: &DdConfig) -> bool {
    match kind {
        ActionKind::Favorite | ActionKind::Like => true,
        ActionKind::Comment => cfg.include_comments,
        _ => false,
    }
}

/// Reference ranking from raw action counts over the snapshot's window:
/// each node scores its consumption-action count divided by its add-one
/// smoothed content-creation count. Counting reads the log directly, so it is
/// independent of the snapshot's edge policy.
pub fn data_driven_rank(log: &EventLog, graph: &SnapshotGraph, cfg: &DdConfig) -> RankVector {
    let window = graph.window();
    let mut consumed: HashMap<NodeId, u64> = HashMap::new();
    let mut produced: HashMap<NodeId, u64> = HashMap::new();
    for ev in log.events() {
        if !window.contains(ev.timestamp) {
            continue;
        }
        if dd_counts_kind(ev.kind, cfg) && ev.target_node.is_some() {
            *consumed.entry(ev.actor).or_insert(0) += 1;
        } else if ev.kind.is_production() {
            *produced.entry(ev.actor).or_insert(0) += 1;
        }
    }
    let scores = graph
        .nodes()
        .iter()
        .map(|n| {
            let c = consumed.get(n).copied().unwrap_or(0) as f64;
            let p = produced.get(n).copied().unwrap_or(0) as f64;
            c / (p + 1.0)
        })
        .collect();
    RankVector::new(
        Algorithm::Dd,
        graph.spec(),
        graph.nodes().to_vec(),
        scores,
        0,
        0.0,
        true,
    )
}

/// Kendall rank correlation between two total orders over the same node set:
/// `1 - 2 * |symmetric difference of ordered-pair sets| / (M (M - 1))`.
pub fn kendall_tau(left: &RankingList, right: &RankingList) -> Result<f64> {
    let m = left.len();
    if m != right.len() || {
        let a: HashSet<NodeId> = left.nodes.iter().copied().collect();
        let b: HashSet<NodeId> = right.nodes.iter().copied().collect();
        a != b
    } {
        return Err(Error::MismatchedRankings);
    }
    if m < 2 {
        return Err(Error::ListTooShort { min: 2, got: m });
    }
    let position: HashMap<NodeId, usize> = right
        .nodes
        .iter()
        .enumerate()
        .map(|(i, &n)| (n, i))
        .collect();
    let sequence: Vec<usize> = left.nodes.iter().map(|n| position[n]).collect();
    // Each discordant pair is unshared in both directions, contributing 2.
    let discordant = count_inversions(&sequence);
    let pairs = (m * (m - 1)) as f64;
    Ok(1.0 - 4.0 * discordant as f64 / pairs)
}

fn count_inversions(seq: &[usize]) -> u64 {
    fn merge_count(data: &mut [usize], buf: &mut [usize]) -> u64 {
        let n = data.len();
        if n <= 1 {
            return 0;
        }
        let mid = n / 2;
        let mut inversions =
            merge_count(&mut data[..mid], buf) + merge_count(&mut data[mid..], buf);
        let (left, right) = data.split_at(mid);
        let (mut i, mut j) = (0, 0);
        for slot in buf[..n].iter_mut() {
            if i < left.len() && (j >= right.len() || left[i] <= right[j]) {
                *slot = left[i];
                i += 1;
            } else {
                inversions += (left.len() - i) as u64;
                *slot = right[j];
                j += 1;
            }
        }
        data.copy_from_slice(&buf[..n]);
        inversions
    }
    let mut data = seq.to_vec();
    let mut buf = vec![0usize; data.len()];
    merge_count(&mut data, &mut buf)
}

/// Top-weighted prefix agreement between two (possibly partial) top lists:
/// the mean over depths `1..=k` of the prefix-overlap fraction.
pub fn fagin_intersection(left: &RankingList, right: &RankingList, k: usize) -> Result<f64> {
    let max = left.len().min(right.len());
    if k == 0 || k > max {
        return Err(Error::KOutOfRange { k, max });
    }
    let mut seen_left: HashSet<NodeId> = HashSet::with_capacity(k);
    let mut seen_right: HashSet<NodeId> = HashSet::with_capacity(k);
    let mut overlap = 0usize;
    let mut total = 0.0;
    for q in 1..=k {
        let a = left.nodes[q - 1];
        let b = right.nodes[q - 1];
        seen_left.insert(a);
        if seen_right.contains(&a) {
            overlap += 1;
        }
        seen_right.insert(b);
        if seen_left.contains(&b) {
            overlap += 1;
        }
        total += overlap as f64 / q as f64;
    }
    Ok(total / k as f64)
}

/// `k = ceil(frac * M)` as used for the fixed-fraction prefix metric.
pub fn fraction_depth(len: usize, frac: f64) -> usize {
    ((frac * len as f64).ceil() as usize).clamp(1, len.max(1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizeMethod {
    /// Affine map onto `[0, 1]`; a constant vector maps to all 0.5.
    MinMax,
    /// Divide by the score total; an all-zero vector is left unchanged.
    Sum1,
}

/// Rescale a score vector without reordering it.
pub fn normalize_scores(vector: &RankVector, method: NormalizeMethod) -> RankVector {
    let scores = vector.scores();
    let rescaled: Vec<f64> = match method {
        NormalizeMethod::MinMax => {
            let min = scores.iter().copied().fold(f64::INFINITY, f64::min);
            let max = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            if max == min {
                vec![0.5; scores.len()]
            } else {
                scores.iter().map(|s| (s - min) / (max - min)).collect()
            }
        }
        NormalizeMethod::Sum1 => {
            let total: f64 = scores.iter().sum();
            if total == 0.0 {
                scores.to_vec()
            } else {
                scores.iter().map(|s| s / total).collect()
            }
        }
    };
    RankVector::new(
        vector.algorithm,
        vector.spec,
        vector.nodes().to_vec(),
        rescaled,
        vector.iterations,
        vector.residual,
        vector.converged,
    )
}
