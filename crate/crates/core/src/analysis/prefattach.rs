//! Preferential-attachment analysis between lurkers and active users over
//! weekly windows.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::event::{ActionKind, EventLog, NodeId, TemporalInterval};
use crate::snapshot::EdgePolicy;

/// Direction of the attachment being measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum PrefAttachMode {
    /// New links received by active users from lurkers, as a function of the
    /// number of lurker-followers they already have.
    ReceivedByActive,
    /// New links produced by lurkers toward active users, as a function of
    /// the number of active followees they already have.
    ProducedByLurkers,
}

/// Lurker/active status sets at one week boundary.
#[derive(Debug, Clone, Default)]
pub struct WeekCategories {
    pub lurkers: BTreeSet<NodeId>,
    pub actives: BTreeSet<NodeId>,
}

/// Aggregated attachment response with its linear fit.
#[derive(Debug, Clone, Serialize)]
pub struct PrefAttachResult {
    /// `(k, average new qualifying links per user-week)` sorted by `k`.
    pub points: Vec<(u64, f64)>,
    pub slope: f64,
    pub intercept: f64,
    /// Pearson correlation over the aggregated points; 0 when degenerate.
    pub correlation: f64,
    /// Number of (user, week) observations pooled.
    pub observations: usize,
}

/// Measure attachment over consecutive weekly windows.
///
/// `weeks` are the window intervals, oldest first; `categories[w]` gives each
/// user's status at the end of week `w`. For every transition `w -> w+1` and
/// every subject in the week-`w` category, `k` counts qualifying partners
/// linked by the end of week `w`, and the response counts links first
/// appearing during week `w+1` whose partner qualifies at week `w+1`.
pub fn preferential_attachment_series(
    log: &EventLog,
    weeks: &[TemporalInterval],
    categories: &[WeekCategories],
    mode: PrefAttachMode,
    policy: EdgePolicy,
) -> Result<PrefAttachResult> {
    if weeks.len() < 2 {
        return Err(Error::InvalidParameter {
            field: "weeks",
            msg: format!("need at least 2 windows, got {}", weeks.len()),
        });
    }
    if categories.len() != weeks.len() {
        return Err(Error::InvalidParameter {
            field: "categories",
            msg: "one category set per week is required".into(),
        });
    }

    // First time each directed pair (producer u, consumer v) appears, under
    // the same edge policy the snapshot graphs use.
    let admits = |kind: ActionKind| match policy {
        EdgePolicy::All => kind.is_consumption() || kind == ActionKind::Follow,
        EdgePolicy::InteractionOnly => kind.is_consumption(),
        EdgePolicy::FollowshipOnly => kind == ActionKind::Follow,
    };
    let mut first_link: HashMap<(NodeId, NodeId), i64> = HashMap::new();
    for ev in log.events() {
        if !admits(ev.kind) {
            continue;
        }
        let Some(u) = ev.target_node else { continue };
        first_link.entry((u, ev.actor)).or_insert(ev.timestamp);
    }
    // Adjacency with first-link times, from the subject's point of view.
    // ReceivedByActive walks an active user's consumers; ProducedByLurkers
    // walks a lurker's sources.
    let mut partners: HashMap<NodeId, Vec<(NodeId, i64)>> = HashMap::new();
    for (&(u, v), &t) in &first_link {
        match mode {
            PrefAttachMode::ReceivedByActive => partners.entry(u).or_default().push((v, t)),
            PrefAttachMode::ProducedByLurkers => partners.entry(v).or_default().push((u, t)),
        }
    }

    let mut responses: BTreeMap<u64, (f64, usize)> = BTreeMap::new();
    let mut observations = 0usize;
    let empty: Vec<(NodeId, i64)> = Vec::new();
    for w in 0..weeks.len() - 1 {
        let (now, next) = (&categories[w], &categories[w + 1]);
        let (subjects, partners_now, partners_next) = match mode {
            PrefAttachMode::ReceivedByActive => (&now.actives, &now.lurkers, &next.lurkers),
            PrefAttachMode::ProducedByLurkers => (&now.lurkers, &now.actives, &next.actives),
        };
        let end_now = weeks[w].end;
        let end_next = weeks[w + 1].end;
        for &subject in subjects {
            let links = partners.get(&subject).unwrap_or(&empty);
            let k = links
                .iter()
                .filter(|(p, t)| *t <= end_now && partners_now.contains(p))
                .count() as u64;
            let new = links
                .iter()
                .filter(|(p, t)| *t > end_now && *t <= end_next && partners_next.contains(p))
                .count() as f64;
            let entry = responses.entry(k).or_insert((0.0, 0));
            entry.0 += new;
            entry.1 += 1;
            observations += 1;
        }
    }

    let points: Vec<(u64, f64)> = responses
        .into_iter()
        .map(|(k, (sum, n))| (k, sum / n as f64))
        .collect();
    if points.len() < 2 {
        return Err(Error::DegenerateFit(format!(
            "need at least 2 distinct k values, got {}",
            points.len()
        )));
    }

    let (slope, intercept, correlation) = linear_fit(&points);
    Ok(PrefAttachResult {
        points,
        slope,
        intercept,
        correlation,
        observations,
    })
}

fn linear_fit(points: &[(u64, f64)]) -> (f64, f64, f64) {
    let n = points.len() as f64;
    let mean_x = points.iter().map(|(k, _)| *k as f64).sum::<f64>() / n;
    let mean_y = points.iter().map(|(_, y)| y).sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for &(k, y) in points {
        let dx = k as f64 - mean_x;
        let dy = y - mean_y;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let correlation = if syy == 0.0 { 0.0 } else { sxy / (sxx * syy).sqrt() };
    (slope, intercept, correlation)
}
