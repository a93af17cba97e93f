//! Freshness and activity-trend measures at user and interaction level.
//!
//! Freshness rewards recent actions with a slow logarithmic decay toward the
//! end of a window of interest. Activity trends compress a per-day action
//! series into slope segments (derivative estimation, greedy segmentation,
//! per-segment arctangent of the mean slope), normalized so 0.5 is flat and
//! values above 0.5 indicate increasing activity. Cumulative variants fold a
//! whole history of per-interval values into one score per interval.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::event::{EventLog, NodeId, TemporalInterval};
use crate::snapshot::SnapshotGraph;

/// Recency kernel over `T = [t_s, t_e]`: `1 / log2(2 + (t_e - t))` inside the
/// interval, 0 outside. Ranges in `[0, 1]` and equals 1 at `t = t_e`.
pub fn freshness_kernel(t: i64, interval: TemporalInterval) -> f64 {
    if !interval.contains(t) {
        return 0.0;
    }
    1.0 / (2.0 + (interval.end - t) as f64).log2()
}

/// Maximum freshness over `node`'s action times inside `T`; 0 when the node
/// performed no action in `T`.
pub fn user_freshness(log: &EventLog, node: NodeId, interval: TemporalInterval) -> Result<f64> {
    if !log.contains_node(node) {
        return Err(Error::UnknownNodeId(node));
    }
    Ok(node_freshness_in(log, node, interval))
}

pub(crate) fn node_freshness_in(log: &EventLog, node: NodeId, interval: TemporalInterval) -> f64 {
    let actions = log.actions_of(node).expect("registered node");
    actions
        .iter()
        .map(|&i| freshness_kernel(log.events()[i].timestamp, interval))
        .fold(0.0, f64::max)
}

/// Per-day action counts for a user or a directed interaction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActivitySeries {
    /// `(count, day)` pairs, days strictly increasing, zero-count days omitted.
    pub points: Vec<(u32, i64)>,
}

impl ActivitySeries {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Subject of an activity series: a node, or the directed interaction
/// `(producer, consumer)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActivitySubject {
    Node(NodeId),
    Edge(NodeId, NodeId),
}

/// Activity series of a subject over the whole log.
///
/// For a node: per-day counts of all its actions. For an edge `(u, v)`:
/// per-day counts of `v`'s consumption actions targeting `u`.
pub fn activity_series(log: &EventLog, subject: ActivitySubject) -> Result<ActivitySeries> {
    match subject {
        ActivitySubject::Node(n) => {
            if !log.contains_node(n) {
                return Err(Error::UnknownNodeId(n));
            }
            Ok(node_series_until(log, n, log.timespan().end))
        }
        ActivitySubject::Edge(u, v) => {
            if !log.contains_node(u) {
                return Err(Error::UnknownNodeId(u));
            }
            if !log.contains_node(v) {
                return Err(Error::UnknownNodeId(v));
            }
            Ok(edge_series_until(log, u, v, log.timespan().end))
        }
    }
}

/// Per-day counts of all actions of `node` with timestamp <= `t_max`.
pub(crate) fn node_series_until(log: &EventLog, node: NodeId, t_max: i64) -> ActivitySeries {
    let actions = log.actions_of(node).expect("registered node");
    collect_daily(
        actions
            .iter()
            .map(|&i| log.events()[i].timestamp)
            .take_while(|&t| t <= t_max),
    )
}

/// Per-day counts of `v`'s consumption actions targeting `u`, up to `t_max`.
pub(crate) fn edge_series_until(
    log: &EventLog,
    u: NodeId,
    v: NodeId,
    t_max: i64,
) -> ActivitySeries {
    let actions = log.actions_of(v).expect("registered node");
    collect_daily(
        actions
            .iter()
            .map(|&i| &log.events()[i])
            .take_while(|ev| ev.timestamp <= t_max)
            .filter(|ev| ev.kind.is_consumption() && ev.target_node == Some(u))
            .map(|ev| ev.timestamp),
    )
}

fn collect_daily(times: impl Iterator<Item = i64>) -> ActivitySeries {
    let mut points: Vec<(u32, i64)> = Vec::new();
    for t in times {
        match points.last_mut() {
            Some(last) if last.1 == t => last.0 += 1,
            _ => points.push((1, t)),
        }
    }
    ActivitySeries { points }
}

/// One slope segment of a compressed activity trend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DsaSegment {
    /// Normalized slope angle `arctan(mean derivative)/pi + 1/2`, in (0, 1).
    pub alpha_hat: f64,
    /// Day of the first point covered by the segment.
    pub start_time: i64,
    /// Day of the last point covered by the segment.
    pub end_time: i64,
    /// Number of derivative points aggregated.
    pub len: usize,
}

/// Derivative-segment approximation of an activity series.
#[derive(Debug, Clone, PartialEq)]
pub struct DsaSeries {
    pub segments: Vec<DsaSegment>,
    pub source_len: usize,
}

/// Parameters of the segment approximation.
#[derive(Debug, Clone, Copy, Default)]
pub struct DsaParams {
    /// Segmentation threshold. `None` uses half the standard deviation of the
    /// derivative series.
    pub epsilon: Option<f64>,
}

/// Compress an activity series into slope segments.
///
/// Derivatives are backward differences over actual day gaps, with the first
/// point copying the second. Segmentation grows a segment while each new
/// derivative stays within `epsilon` of the running segment mean. A length-1
/// series has no derivative and yields one neutral (`alpha_hat = 0.5`)
/// segment.
pub fn dsa_transform(series: &ActivitySeries, params: &DsaParams) -> Result<DsaSeries> {
    let n = series.len();
    if n == 0 {
        return Err(Error::EmptySeries);
    }
    if n == 1 {
        let day = series.points[0].1;
        return Ok(DsaSeries {
            segments: vec![DsaSegment {
                alpha_hat: 0.5,
                start_time: day,
                end_time: day,
                len: 1,
            }],
            source_len: 1,
        });
    }

    let pts = &series.points;
    let mut deriv = Vec::with_capacity(n);
    deriv.push(0.0); // placeholder, replaced by the second value below
    for k in 1..n {
        let dx = pts[k].0 as f64 - pts[k - 1].0 as f64;
        let dt = (pts[k].1 - pts[k - 1].1) as f64;
        deriv.push(dx / dt);
    }
    deriv[0] = deriv[1];

    let epsilon = params.epsilon.unwrap_or_else(|| {
        let mean = deriv.iter().sum::<f64>() / n as f64;
        let var = deriv.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / n as f64;
        0.5 * var.sqrt()
    });

    let mut segments = Vec::new();
    let mut seg_start = 0usize;
    let mut seg_sum = deriv[0];
    for k in 1..=n {
        let extend = k < n && {
            let mean = seg_sum / (k - seg_start) as f64;
            (deriv[k] - mean).abs() <= epsilon
        };
        if extend {
            seg_sum += deriv[k];
            continue;
        }
        let len = k - seg_start;
        let mean = seg_sum / len as f64;
        segments.push(DsaSegment {
            alpha_hat: mean.atan() / std::f64::consts::PI + 0.5,
            start_time: pts[seg_start].1,
            end_time: pts[k - 1].1,
            len,
        });
        if k < n {
            seg_start = k;
            seg_sum = deriv[k];
        }
    }

    Ok(DsaSeries {
        segments,
        source_len: n,
    })
}

/// Mean `alpha_hat` over segments whose day span intersects `T`; 0 when no
/// segment intersects.
pub fn average_activity(dsa: &DsaSeries, interval: TemporalInterval) -> f64 {
    let mut sum = 0.0;
    let mut count = 0usize;
    for seg in &dsa.segments {
        let span = TemporalInterval::new(seg.start_time, seg.end_time);
        if span.intersects(&interval) {
            sum += seg.alpha_hat;
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        sum / count as f64
    }
}

/// Maximum freshness over the (production-time, consumption-time) pairs of
/// the interaction `u -> v` falling inside `T`: pairs where `v` consumed a
/// post of `u` whose production time is known, with `t_s <= t_p` and
/// `t_c <= t_e`. Returns 0 when no qualifying pair exists (including when the
/// interaction is absent).
pub fn interaction_freshness(
    log: &EventLog,
    u: NodeId,
    v: NodeId,
    interval: TemporalInterval,
) -> f64 {
    if !log.contains_node(u) || !log.contains_node(v) {
        return 0.0;
    }
    let mut best = 0.0f64;
    for &i in log.actions_of(v).expect("registered node") {
        let ev = &log.events()[i];
        if ev.timestamp > interval.end {
            break;
        }
        if !ev.kind.is_consumption() || ev.target_node != Some(u) {
            continue;
        }
        let Some(pid) = ev.target_post else { continue };
        let Some((_, t_p)) = log.posts().produced(pid) else {
            continue;
        };
        let t_c = ev.timestamp;
        if t_p < interval.start || t_p > t_c {
            continue;
        }
        best = best.max(freshness_kernel(t_p, TemporalInterval::new(t_p, t_c)));
    }
    best
}

/// How the cumulative normalization denominator is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormalizationMode {
    /// Maximum over intervals up to and including the current one, so scores
    /// at interval `i` never depend on later data.
    Causal,
    /// Maximum over every interval of the table.
    Acausal,
}

/// Raw and normalized cumulative values per interval index for one subject.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeSeries {
    pub raw: Vec<f64>,
    pub normalized: Vec<f64>,
}

/// Fold per-interval transient values into cumulative scores.
///
/// `raw[i] = t[i] + sum_{k<i} (1 - 2^(k-i)) t[k]`, then
/// `normalized[i] = raw[i] / max_j raw[j] * t[i]` with the max ranging per
/// `mode`; a zero maximum normalizes to 0.
pub fn cumulative_series(transient: &[f64], mode: NormalizationMode) -> CumulativeSeries {
    let n = transient.len();
    let mut raw = Vec::with_capacity(n);
    for i in 0..n {
        let mut acc = transient[i];
        for (k, &t_k) in transient.iter().enumerate().take(i) {
            acc += (1.0 - 2f64.powi(k as i32 - i as i32)) * t_k;
        }
        raw.push(acc);
    }
    let full_max = raw.iter().copied().fold(0.0, f64::max);
    let mut running_max = 0.0f64;
    let mut normalized = Vec::with_capacity(n);
    for i in 0..n {
        running_max = running_max.max(raw[i]);
        let denom = match mode {
            NormalizationMode::Causal => running_max,
            NormalizationMode::Acausal => full_max,
        };
        normalized.push(if denom == 0.0 {
            0.0
        } else {
            raw[i] / denom * transient[i]
        });
    }
    CumulativeSeries { raw, normalized }
}

/// Transient and cumulative freshness/activity values for one subject.
#[derive(Debug, Clone, PartialEq)]
pub struct SubjectCumulative {
    /// Transient freshness per interval.
    pub f: Vec<f64>,
    /// Transient average activity per interval.
    pub a: Vec<f64>,
    pub cf: Vec<f64>,
    pub ca: Vec<f64>,
    pub cf_norm: Vec<f64>,
    pub ca_norm: Vec<f64>,
}

impl SubjectCumulative {
    fn from_transient(f: Vec<f64>, a: Vec<f64>, mode: NormalizationMode) -> Self {
        let cf = cumulative_series(&f, mode);
        let ca = cumulative_series(&a, mode);
        SubjectCumulative {
            f,
            a,
            cf: cf.raw,
            ca: ca.raw,
            cf_norm: cf.normalized,
            ca_norm: ca.normalized,
        }
    }
}

/// Per-subject cumulative score table over a sequence of consecutive
/// sub-intervals, for every node and edge of a snapshot.
#[derive(Debug, Clone)]
pub struct CumulativeScoreTable {
    intervals: Vec<TemporalInterval>,
    nodes: BTreeMap<NodeId, SubjectCumulative>,
    edges: BTreeMap<(NodeId, NodeId), SubjectCumulative>,
}

impl CumulativeScoreTable {
    /// Build the table for all nodes and edges of `graph` over `intervals`
    /// (consecutive transient sub-intervals, oldest first).
    ///
    /// Activity trends for interval `T_k` are computed from each subject's
    /// series clipped to `T_k`'s end, so entries at index `k` are independent
    /// of later events.
    pub fn build(
        log: &EventLog,
        graph: &SnapshotGraph,
        intervals: &[TemporalInterval],
        dsa: &DsaParams,
        mode: NormalizationMode,
    ) -> Result<CumulativeScoreTable> {
        let mut nodes = BTreeMap::new();
        for &node in graph.nodes() {
            let mut f = Vec::with_capacity(intervals.len());
            let mut a = Vec::with_capacity(intervals.len());
            for t in intervals {
                f.push(node_freshness_in(log, node, *t));
                a.push(clipped_average_activity(
                    &node_series_until(log, node, t.end),
                    *t,
                    dsa,
                )?);
            }
            nodes.insert(node, SubjectCumulative::from_transient(f, a, mode));
        }
        let mut edges = BTreeMap::new();
        for edge in graph.edges() {
            let u = graph.node_at(edge.src);
            let v = graph.node_at(edge.dst);
            let mut f = Vec::with_capacity(intervals.len());
            let mut a = Vec::with_capacity(intervals.len());
            for t in intervals {
                f.push(interaction_freshness(log, u, v, *t));
                a.push(clipped_average_activity(
                    &edge_series_until(log, u, v, t.end),
                    *t,
                    dsa,
                )?);
            }
            edges.insert((u, v), SubjectCumulative::from_transient(f, a, mode));
        }
        Ok(CumulativeScoreTable {
            intervals: intervals.to_vec(),
            nodes,
            edges,
        })
    }

    pub fn intervals(&self) -> &[TemporalInterval] {
        &self.intervals
    }

    pub fn node(&self, node: NodeId) -> Option<&SubjectCumulative> {
        self.nodes.get(&node)
    }

    pub fn edge(&self, u: NodeId, v: NodeId) -> Option<&SubjectCumulative> {
        self.edges.get(&(u, v))
    }

    pub fn node_entries(&self) -> impl Iterator<Item = (&NodeId, &SubjectCumulative)> {
        self.nodes.iter()
    }

    /// Audit dump of the node-level table as CSV
    /// `node,interval_index,freshness,avg_activity,cf,ca,cf_norm,ca_norm`.
    pub fn features_csv(&self, table: &crate::event::NodeTable) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record([
            "node",
            "interval_index",
            "freshness",
            "avg_activity",
            "cf",
            "ca",
            "cf_norm",
            "ca_norm",
        ])
        .expect("csv header");
        for (node, sc) in &self.nodes {
            for i in 0..self.intervals.len() {
                w.write_record([
                    table.label(*node),
                    &i.to_string(),
                    &sc.f[i].to_string(),
                    &sc.a[i].to_string(),
                    &sc.cf[i].to_string(),
                    &sc.ca[i].to_string(),
                    &sc.cf_norm[i].to_string(),
                    &sc.ca_norm[i].to_string(),
                ])
                .expect("csv row");
            }
        }
        String::from_utf8(w.into_inner().expect("csv flush")).expect("csv utf8")
    }
}

fn clipped_average_activity(
    series: &ActivitySeries,
    interval: TemporalInterval,
    dsa: &DsaParams,
) -> Result<f64> {
    if series.is_empty() {
        return Ok(0.0);
    }
    let compressed = dsa_transform(series, dsa)?;
    Ok(average_activity(&compressed, interval))
}

/// Transient freshness and average activity for every node and edge of one
/// snapshot, aligned with the snapshot's node and edge orders.
#[derive(Debug, Clone)]
pub struct SnapshotFeatures {
    pub node_freshness: Vec<f64>,
    pub node_activity: Vec<f64>,
    pub edge_freshness: Vec<f64>,
    pub edge_activity: Vec<f64>,
}

impl SnapshotFeatures {
    /// Compute features over the snapshot's window. Activity series are
    /// clipped to the window end so results do not depend on later events.
    pub fn compute(log: &EventLog, graph: &SnapshotGraph, dsa: &DsaParams) -> Result<Self> {
        let window = graph.window();
        let mut node_freshness = Vec::with_capacity(graph.node_count());
        let mut node_activity = Vec::with_capacity(graph.node_count());
        for &node in graph.nodes() {
            node_freshness.push(node_freshness_in(log, node, window));
            node_activity.push(clipped_average_activity(
                &node_series_until(log, node, window.end),
                window,
                dsa,
            )?);
        }
        let mut edge_freshness = Vec::with_capacity(graph.edge_count());
        let mut edge_activity = Vec::with_capacity(graph.edge_count());
        for edge in graph.edges() {
            let u = graph.node_at(edge.src);
            let v = graph.node_at(edge.dst);
            edge_freshness.push(interaction_freshness(log, u, v, window));
            edge_activity.push(clipped_average_activity(
                &edge_series_until(log, u, v, window.end),
                window,
                dsa,
            )?);
        }
        Ok(SnapshotFeatures {
            node_freshness,
            node_activity,
            edge_freshness,
            edge_activity,
        })
    }
}
