//! Responsiveness latencies: empirical CDF of day gaps between consecutive
//! responsive actions toward followees.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::event::{ActionKind, EventLog, NodeId};

/// Default latency horizon in days.
pub const DEFAULT_HORIZON: i64 = 90;

/// Empirical cumulative distribution over pooled latencies within the
/// horizon. Empty when no member produced two responsive actions.
#[derive(Debug, Clone, Serialize)]
pub struct Ecdf {
    /// `(latency_days, cumulative_fraction)` at each distinct latency,
    /// non-decreasing, reaching 1 at the largest pooled latency.
    pub points: Vec<(i64, f64)>,
    /// Number of pooled latency samples within the horizon.
    pub samples: usize,
}

impl Ecdf {
    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Fraction of latencies at or below `x`; 0 below the first point.
    pub fn value_at(&self, x: i64) -> f64 {
        match self.points.partition_point(|&(lat, _)| lat <= x) {
            0 => 0.0,
            i => self.points[i - 1].1,
        }
    }
}

/// Build the ECDF from parallel latency samples.
pub fn ecdf_from_latencies(latencies: &[i64], horizon: i64) -> Ecdf {
    let mut counts: BTreeMap<i64, usize> = BTreeMap::new();
    for &lat in latencies {
        if lat <= horizon {
            *counts.entry(lat).or_insert(0) += 1;
        }
    }
    let total: usize = counts.values().sum();
    let mut points = Vec::with_capacity(counts.len());
    let mut seen = 0usize;
    for (lat, count) in counts {
        seen += count;
        points.push((lat, seen as f64 / total as f64));
    }
    Ecdf {
        points,
        samples: total,
    }
}

/// Pool, over all members of `group`, the day differences between their
/// consecutive responsive actions, and return the ECDF over `[0, horizon]`.
///
/// A responsive action is a favorite/like/comment by `v` targeting a user `v`
/// follows at the time of the action (the follow edge must already exist).
pub fn responsiveness_ecdf(log: &EventLog, group: &BTreeSet<NodeId>, horizon: i64) -> Ecdf {
    let mut latencies = Vec::new();
    for &member in group {
        let Ok(actions) = log.actions_of(member) else {
            continue;
        };
        // Followees of the member with their first follow time.
        let mut followed: HashMap<NodeId, i64> = HashMap::new();
        for &i in actions {
            let ev = &log.events()[i];
            if ev.kind == ActionKind::Follow {
                if let Some(t) = ev.target_node {
                    followed.entry(t).or_insert(ev.timestamp);
                }
            }
        }
        let mut previous: Option<i64> = None;
        for &i in actions {
            let ev = &log.events()[i];
            if !ev.kind.is_consumption() {
                continue;
            }
            let Some(target) = ev.target_node else { continue };
            match followed.get(&target) {
                Some(&since) if since <= ev.timestamp => {}
                _ => continue,
            }
            if let Some(prev) = previous {
                latencies.push(ev.timestamp - prev);
            }
            previous = Some(ev.timestamp);
        }
    }
    ecdf_from_latencies(&latencies, horizon)
}
