//! Snapshot graphs over windows of the event log.
//!
//! A snapshot materializes the directed consumption graph of one time window:
//! edge `(u, v)` means `v` consumed information produced by `u` (a favorite,
//! like or comment on `u`'s content, or a followship of `u`). Transient
//! snapshots cover a single fixed-length window; cumulative snapshots grow
//! from a fixed start. Degree accessors are Laplace add-one smoothed so the
//! ratio terms of the rankers are always finite and positive.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::event::{ActionKind, EventLog, NodeId, NodeTable, TemporalInterval};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SnapshotMode {
    Transient,
    Cumulative,
}

impl SnapshotMode {
    pub fn as_str(&self) -> &'static str {
        match self {
            SnapshotMode::Transient => "transient",
            SnapshotMode::Cumulative => "cumulative",
        }
    }
}

/// Which events induce edges.
///
/// `All` uses consumption and follow events alike; `InteractionOnly` drops
/// follows, `FollowshipOnly` drops consumption events. The node set always
/// comes from every event in the window, so rankings over the same window
/// stay comparable across policies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EdgePolicy {
    All,
    InteractionOnly,
    FollowshipOnly,
}

impl EdgePolicy {
    fn admits(&self, kind: ActionKind) -> bool {
        match self {
            EdgePolicy::All => kind.is_consumption() || kind == ActionKind::Follow,
            EdgePolicy::InteractionOnly => kind.is_consumption(),
            EdgePolicy::FollowshipOnly => kind == ActionKind::Follow,
        }
    }
}

/// Window selector: mode, interval length in days, fixed start day, index.
///
/// Transient windows partition the timeline as `[start, start+L]`,
/// `(start+L, start+2L]`, and so on; only the first window includes its left
/// endpoint. The cumulative window at index `i` is `[start, start+(i+1)L]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SnapshotSpec {
    pub mode: SnapshotMode,
    pub interval_days: i64,
    pub start: i64,
    pub index: usize,
}

impl SnapshotSpec {
    pub fn new(mode: SnapshotMode, interval_days: i64, start: i64, index: usize) -> Result<Self> {
        if interval_days <= 0 {
            return Err(Error::InvalidParameter {
                field: "interval_days",
                msg: format!("must be positive, got {interval_days}"),
            });
        }
        Ok(SnapshotSpec {
            mode,
            interval_days,
            start,
            index,
        })
    }

    /// The closed day interval covered by this snapshot.
    pub fn window(&self) -> TemporalInterval {
        let i = self.index as i64;
        let end = self.start + (i + 1) * self.interval_days;
        let start = match self.mode {
            SnapshotMode::Cumulative => self.start,
            SnapshotMode::Transient => {
                if self.index == 0 {
                    self.start
                } else {
                    self.start + i * self.interval_days + 1
                }
            }
        };
        TemporalInterval::new(start, end)
    }

    /// The transient sub-intervals `T_0..=T_index` sharing this spec's start
    /// and length. For a cumulative spec these partition its window.
    pub fn sub_intervals(&self) -> Vec<TemporalInterval> {
        (0..=self.index)
            .map(|i| {
                SnapshotSpec {
                    mode: SnapshotMode::Transient,
                    interval_days: self.interval_days,
                    start: self.start,
                    index: i,
                }
                .window()
            })
            .collect()
    }

    /// Number of windows needed to cover `span` from `start`.
    pub fn count_covering(span: TemporalInterval, start: i64, interval_days: i64) -> usize {
        if span.end <= start {
            return 1;
        }
        (((span.end - start) + interval_days - 1) / interval_days) as usize
    }
}

/// One directed edge with its supporting event indices (into the log).
#[derive(Debug, Clone)]
pub struct SnapshotEdge {
    /// Local index of the producing node `u`.
    pub src: usize,
    /// Local index of the consuming node `v`.
    pub dst: usize,
    pub events: Vec<usize>,
    pub first_ts: i64,
    pub last_ts: i64,
}

/// Directed consumption graph for one window.
#[derive(Debug, Clone)]
pub struct SnapshotGraph {
    spec: SnapshotSpec,
    policy: EdgePolicy,
    window: TemporalInterval,
    nodes: Vec<NodeId>,
    pos: HashMap<NodeId, usize>,
    in_nb: Vec<Vec<usize>>,
    out_nb: Vec<Vec<usize>>,
    edges: Vec<SnapshotEdge>,
    edge_idx: HashMap<(usize, usize), usize>,
    node_events: Vec<Vec<usize>>,
    event_count: usize,
}

/// Build the snapshot for `spec` over `log`.
///
/// A window disjoint from the log's timespan yields an empty snapshot
/// (`is_empty()`), not an error.
pub fn build_snapshot(log: &EventLog, spec: SnapshotSpec, policy: EdgePolicy) -> SnapshotGraph {
    let window = spec.window();

    // Window events define the node universe; policy filters edges only.
    let mut node_set: Vec<NodeId> = Vec::new();
    let mut seen = vec![false; log.nodes().len()];
    let mark = |id: NodeId, set: &mut Vec<NodeId>, seen: &mut Vec<bool>| {
        if !seen[id.0 as usize] {
            seen[id.0 as usize] = true;
            set.push(id);
        }
    };
    let mut window_events = Vec::new();
    for (i, ev) in log.events().iter().enumerate() {
        if !window.contains(ev.timestamp) {
            continue;
        }
        window_events.push(i);
        mark(ev.actor, &mut node_set, &mut seen);
        if let Some(t) = ev.target_node {
            mark(t, &mut node_set, &mut seen);
        }
    }
    node_set.sort_unstable();
    let pos: HashMap<NodeId, usize> = node_set
        .iter()
        .enumerate()
        .map(|(i, &n)| (n, i))
        .collect();

    let n = node_set.len();
    let mut edge_idx: HashMap<(usize, usize), usize> = HashMap::new();
    let mut edges: Vec<SnapshotEdge> = Vec::new();
    let mut node_events = vec![Vec::new(); n];
    for &i in &window_events {
        let ev = &log.events()[i];
        node_events[pos[&ev.actor]].push(i);
        if !policy.admits(ev.kind) {
            continue;
        }
        let Some(target) = ev.target_node else {
            continue;
        };
        // Consumption and follow events by v on u induce edge (u, v).
        let src = pos[&target];
        let dst = pos[&ev.actor];
        let key = (src, dst);
        match edge_idx.get(&key) {
            Some(&e) => {
                let edge = &mut edges[e];
                edge.events.push(i);
                edge.first_ts = edge.first_ts.min(ev.timestamp);
                edge.last_ts = edge.last_ts.max(ev.timestamp);
            }
            None => {
                edge_idx.insert(key, edges.len());
                edges.push(SnapshotEdge {
                    src,
                    dst,
                    events: vec![i],
                    first_ts: ev.timestamp,
                    last_ts: ev.timestamp,
                });
            }
        }
    }

    // Canonical edge order: by (src, dst) local index.
    let mut order: Vec<usize> = (0..edges.len()).collect();
    order.sort_unstable_by_key(|&e| (edges[e].src, edges[e].dst));
    let edges: Vec<SnapshotEdge> = order.into_iter().map(|e| edges[e].clone()).collect();
    let edge_idx: HashMap<(usize, usize), usize> = edges
        .iter()
        .enumerate()
        .map(|(e, edge)| ((edge.src, edge.dst), e))
        .collect();

    let mut in_nb = vec![Vec::new(); n];
    let mut out_nb = vec![Vec::new(); n];
    for edge in &edges {
        // (u, v): u gains consumer v (out-neighbor), v gains source u (in-neighbor).
        out_nb[edge.src].push(edge.dst);
        in_nb[edge.dst].push(edge.src);
    }

    SnapshotGraph {
        spec,
        policy,
        window,
        nodes: node_set,
        pos,
        in_nb,
        out_nb,
        edges,
        edge_idx,
        node_events,
        event_count: window_events.len(),
    }
}

impl SnapshotGraph {
    pub fn spec(&self) -> SnapshotSpec {
        self.spec
    }

    pub fn policy(&self) -> EdgePolicy {
        self.policy
    }

    pub fn window(&self) -> TemporalInterval {
        self.window
    }

    /// Snapshot nodes in ascending id order.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Total number of log events inside the window.
    pub fn event_count(&self) -> usize {
        self.event_count
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn contains(&self, node: NodeId) -> bool {
        self.pos.contains_key(&node)
    }

    /// Local index of `node`, if present.
    pub fn position(&self, node: NodeId) -> Option<usize> {
        self.pos.get(&node).copied()
    }

    pub fn node_at(&self, local: usize) -> NodeId {
        self.nodes[local]
    }

    pub fn edges(&self) -> &[SnapshotEdge] {
        &self.edges
    }

    pub fn edge_between(&self, src: usize, dst: usize) -> Option<&SnapshotEdge> {
        self.edge_idx.get(&(src, dst)).map(|&e| &self.edges[e])
    }

    /// In-neighbor local indices of `local` (its information sources).
    pub fn in_neighbors(&self, local: usize) -> &[usize] {
        &self.in_nb[local]
    }

    /// Out-neighbor local indices of `local` (its consumers).
    pub fn out_neighbors(&self, local: usize) -> &[usize] {
        &self.out_nb[local]
    }

    /// Raw (in, out) degrees by local index.
    pub fn raw_degrees_at(&self, local: usize) -> (usize, usize) {
        (self.in_nb[local].len(), self.out_nb[local].len())
    }

    /// Laplace add-one smoothed (in, out) degrees by local index; never zero.
    pub fn smoothed_degrees_at(&self, local: usize) -> (usize, usize) {
        (self.in_nb[local].len() + 1, self.out_nb[local].len() + 1)
    }

    /// Event indices (into the log) of all window actions performed by `local`.
    pub fn node_events(&self, local: usize) -> &[usize] {
        &self.node_events[local]
    }

    /// Edge list as CSV `src,dst,event_count,first_ts,last_ts` with original
    /// node labels, in canonical (src, dst) order.
    pub fn edge_csv(&self, table: &NodeTable) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["src", "dst", "event_count", "first_ts", "last_ts"])
            .expect("csv header");
        for edge in &self.edges {
            w.write_record([
                table.label(self.nodes[edge.src]),
                table.label(self.nodes[edge.dst]),
                &edge.events.len().to_string(),
                &edge.first_ts.to_string(),
                &edge.last_ts.to_string(),
            ])
            .expect("csv row");
        }
        String::from_utf8(w.into_inner().expect("csv flush")).expect("csv utf8")
    }
}

/// Smoothed `(in, out)` degrees of `node`, or an error if it is not part of
/// the snapshot.
pub fn smoothed_degrees(g: &SnapshotGraph, node: NodeId) -> Result<(usize, usize)> {
    let local = g.position(node).ok_or(Error::NodeNotInSnapshot(node))?;
    Ok(g.smoothed_degrees_at(local))
}
