//! Event-log ingestion and the timestamped action model.
//!
//! Every analysis in this crate starts from an [`EventLog`]: a time-ordered
//! sequence of production (post), consumption (favorite/like/comment) and
//! followship actions, each stamped with an integer day. Node identifiers are
//! opaque strings interned to dense [`NodeId`]s on ingest; the string table is
//! kept on the log so outputs can be written back with the original labels.

use std::collections::HashMap;
use std::fmt;
use std::io::Read;

use serde::Serialize;

use crate::error::{Error, Result};

/// Dense identifier for a user node, assigned in order of first appearance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Dense identifier for a post, assigned in order of first appearance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct PostId(pub u32);

/// Closed integer-day interval `[start, end]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct TemporalInterval {
    pub start: i64,
    pub end: i64,
}

impl TemporalInterval {
    pub fn new(start: i64, end: i64) -> Self {
        assert!(start <= end, "interval start must not exceed end");
        TemporalInterval { start, end }
    }

    pub fn contains(&self, t: i64) -> bool {
        self.start <= t && t <= self.end
    }

    pub fn intersects(&self, other: &TemporalInterval) -> bool {
        self.start <= other.end && other.start <= self.end
    }
}

/// Action kinds recorded in the log.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ActionKind {
    Post,
    Favorite,
    Like,
    Comment,
    Follow,
}

impl ActionKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ActionKind::Post => "post",
            ActionKind::Favorite => "favorite",
            ActionKind::Like => "like",
            ActionKind::Comment => "comment",
            ActionKind::Follow => "follow",
        }
    }

    pub fn parse(s: &str) -> Option<ActionKind> {
        match s {
            "post" => Some(ActionKind::Post),
            "favorite" => Some(ActionKind::Favorite),
            "like" => Some(ActionKind::Like),
            "comment" => Some(ActionKind::Comment),
            "follow" => Some(ActionKind::Follow),
            _ => None,
        }
    }

    /// True for actions that consume another user's content.
    pub fn is_consumption(&self) -> bool {
        matches!(
            self,
            ActionKind::Favorite | ActionKind::Like | ActionKind::Comment
        )
    }

    /// True for actions that create new content.
    pub fn is_production(&self) -> bool {
        matches!(self, ActionKind::Post)
    }
}

/// One timestamped action.
///
/// Consumption and follow actions carry the node whose content is consumed
/// (or followed) in `target_node`; posts carry no target node. `target_post`
/// optionally names the post being created or reacted to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActionEvent {
    pub actor: NodeId,
    pub kind: ActionKind,
    pub target_node: Option<NodeId>,
    pub target_post: Option<PostId>,
    /// Integer day since the log's epoch; never negative.
    pub timestamp: i64,
}

/// String-to-dense-id table for node labels.
#[derive(Debug, Clone, Default)]
pub struct NodeTable {
    labels: Vec<String>,
    index: HashMap<String, NodeId>,
}

impl NodeTable {
    pub fn intern(&mut self, label: &str) -> NodeId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = NodeId(self.labels.len() as u32);
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        id
    }

    pub fn get(&self, label: &str) -> Option<NodeId> {
        self.index.get(label).copied()
    }

    pub fn label(&self, id: NodeId) -> &str {
        &self.labels[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.labels.len() as u32).map(NodeId)
    }
}

/// Post registry: label table plus production metadata where known.
///
/// A post becomes "resolved" once a `post` event naming it is seen; consumption
/// events may reference unresolved posts (e.g. content older than the log), in
/// which case no production time is available for freshness pairing.
#[derive(Debug, Clone, Default)]
pub struct PostTable {
    labels: Vec<String>,
    index: HashMap<String, PostId>,
    produced: Vec<Option<(NodeId, i64)>>,
}

impl PostTable {
    fn intern(&mut self, label: &str) -> PostId {
        if let Some(&id) = self.index.get(label) {
            return id;
        }
        let id = PostId(self.labels.len() as u32);
        self.labels.push(label.to_owned());
        self.index.insert(label.to_owned(), id);
        self.produced.push(None);
        id
    }

    pub fn get(&self, label: &str) -> Option<PostId> {
        self.index.get(label).copied()
    }

    pub fn label(&self, id: PostId) -> &str {
        &self.labels[id.0 as usize]
    }

    /// Author and production day, when a post event for this id exists.
    pub fn produced(&self, id: PostId) -> Option<(NodeId, i64)> {
        self.produced[id.0 as usize]
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Immutable, time-ordered event log.
#[derive(Debug, Clone)]
pub struct EventLog {
    events: Vec<ActionEvent>,
    nodes: NodeTable,
    posts: PostTable,
    timespan: TemporalInterval,
    actor_index: Vec<Vec<usize>>,
}

impl EventLog {
    pub fn events(&self) -> &[ActionEvent] {
        &self.events
    }

    pub fn nodes(&self) -> &NodeTable {
        &self.nodes
    }

    pub fn posts(&self) -> &PostTable {
        &self.posts
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// `[min, max]` event timestamps.
    pub fn timespan(&self) -> TemporalInterval {
        self.timespan
    }

    /// Indices into `events()` of the actions performed by `node`, in time order.
    pub fn actions_of(&self, node: NodeId) -> Result<&[usize]> {
        self.actor_index
            .get(node.0 as usize)
            .map(Vec::as_slice)
            .ok_or(Error::UnknownNodeId(node))
    }

    pub fn contains_node(&self, node: NodeId) -> bool {
        (node.0 as usize) < self.nodes.len()
    }

    /// Serialize to the canonical CSV form (header + one row per event, in
    /// log order). Ingesting the result reproduces an equivalent log.
    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["actor", "kind", "target_node", "target_post", "timestamp"])
            .expect("csv header");
        for ev in &self.events {
            let target_node = ev.target_node.map(|n| self.nodes.label(n)).unwrap_or("");
            let target_post = ev.target_post.map(|p| self.posts.label(p)).unwrap_or("");
            w.write_record([
                self.nodes.label(ev.actor),
                ev.kind.as_str(),
                target_node,
                target_post,
                &ev.timestamp.to_string(),
            ])
            .expect("csv row");
        }
        String::from_utf8(w.into_inner().expect("csv flush")).expect("csv utf8")
    }

    /// Node table as CSV `id,label`.
    pub fn nodes_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["id", "label"]).expect("csv header");
        for id in self.nodes.ids() {
            w.write_record([&id.0.to_string(), self.nodes.label(id)])
                .expect("csv row");
        }
        String::from_utf8(w.into_inner().expect("csv flush")).expect("csv utf8")
    }

    /// Per-kind event counts in kind declaration order
    /// (post, favorite, like, comment, follow).
    pub fn kind_counts(&self) -> [usize; 5] {
        let mut counts = [0usize; 5];
        for ev in &self.events {
            let slot = match ev.kind {
                ActionKind::Post => 0,
                ActionKind::Favorite => 1,
                ActionKind::Like => 2,
                ActionKind::Comment => 3,
                ActionKind::Follow => 4,
            };
            counts[slot] += 1;
        }
        counts
    }
}

/// Incremental constructor for [`EventLog`]; validates per-event invariants
/// as rows are pushed and finalizes ordering on `build`.
#[derive(Debug, Default)]
pub struct EventLogBuilder {
    events: Vec<ActionEvent>,
    nodes: NodeTable,
    posts: PostTable,
}

impl EventLogBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(
        &mut self,
        actor: &str,
        kind: ActionKind,
        target_node: Option<&str>,
        target_post: Option<&str>,
        timestamp: i64,
    ) -> Result<()> {
        self.push_at_line(actor, kind, target_node, target_post, timestamp, 0)
    }

    fn push_at_line(
        &mut self,
        actor: &str,
        kind: ActionKind,
        target_node: Option<&str>,
        target_post: Option<&str>,
        timestamp: i64,
        line: u64,
    ) -> Result<()> {
        let fail = |msg: String| Error::Parse { line, msg };
        if actor.is_empty() {
            return Err(fail("actor must be non-empty".into()));
        }
        if timestamp < 0 {
            return Err(fail(format!("timestamp must be >= 0, got {timestamp}")));
        }
        match kind {
            ActionKind::Post => {
                if target_node.is_some() {
                    return Err(fail("post events must not name a target node".into()));
                }
            }
            _ => {
                if target_node.is_none() {
                    return Err(fail(format!(
                        "{} events require a target node",
                        kind.as_str()
                    )));
                }
            }
        }
        let actor = self.nodes.intern(actor);
        let target_node = target_node.map(|t| self.nodes.intern(t));
        let target_post = target_post.map(|p| self.posts.intern(p));
        self.events.push(ActionEvent {
            actor,
            kind,
            target_node,
            target_post,
            timestamp,
        });
        Ok(())
    }

    pub fn build(self) -> Result<EventLog> {
        let EventLogBuilder {
            mut events,
            nodes,
            mut posts,
        } = self;
        if events.is_empty() {
            return Err(Error::EmptyInput);
        }
        // Stable sort keeps insertion order among same-day events.
        events.sort_by_key(|e| e.timestamp);
        let timespan = TemporalInterval::new(
            events.first().unwrap().timestamp,
            events.last().unwrap().timestamp,
        );
        // Resolve post production info from the earliest post event per id.
        for ev in &events {
            if ev.kind == ActionKind::Post {
                if let Some(pid) = ev.target_post {
                    let slot = &mut posts.produced[pid.0 as usize];
                    if slot.is_none() {
                        *slot = Some((ev.actor, ev.timestamp));
                    }
                }
            }
        }
        let mut actor_index = vec![Vec::new(); nodes.len()];
        for (i, ev) in events.iter().enumerate() {
            actor_index[ev.actor.0 as usize].push(i);
        }
        Ok(EventLog {
            events,
            nodes,
            posts,
            timespan,
            actor_index,
        })
    }
}

const CSV_HEADER: [&str; 5] = ["actor", "kind", "target_node", "target_post", "timestamp"];

/// Parse an event log from CSV with header
/// `actor,kind,target_node,target_post,timestamp`.
///
/// Empty strings stand for absent optional fields. Rows may arrive in any
/// time order; the log is sorted on build. Duplicate rows are kept, since
/// action multiplicities feed the data-driven ranking.
pub fn ingest_events<R: Read>(source: R) -> Result<EventLog> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(source);
    {
        let headers = reader.headers()?;
        let got: Vec<&str> = headers.iter().collect();
        if got != CSV_HEADER {
            return Err(Error::Parse {
                line: 1,
                msg: format!(
                    "expected header `{}`, got `{}`",
                    CSV_HEADER.join(","),
                    got.join(",")
                ),
            });
        }
    }
    let mut builder = EventLogBuilder::new();
    for record in reader.records() {
        let record = record?;
        let line = record.position().map(|p| p.line()).unwrap_or(0);
        let fail = |msg: String| Error::Parse { line, msg };
        let actor = record.get(0).unwrap_or("");
        let kind_str = record.get(1).unwrap_or("");
        let kind = ActionKind::parse(kind_str)
            .ok_or_else(|| fail(format!("unknown action kind `{kind_str}`")))?;
        let target_node = record.get(2).filter(|s| !s.is_empty());
        let target_post = record.get(3).filter(|s| !s.is_empty());
        let ts_str = record.get(4).unwrap_or("");
        let timestamp: i64 = ts_str
            .parse()
            .map_err(|_| fail(format!("invalid timestamp `{ts_str}`")))?;
        builder.push_at_line(actor, kind, target_node, target_post, timestamp, line)?;
    }
    builder.build()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_csv() -> &'static str {
        "actor,kind,target_node,target_post,timestamp\n\
         alice,post,,p1,3\n\
         bob,like,alice,p1,5\n\
         carol,follow,alice,,4\n"
    }

    #[test]
    fn ingest_three_rows() {
        let log = ingest_events(small_csv().as_bytes()).unwrap();
        assert_eq!(log.len(), 3);
        assert_eq!(log.nodes().len(), 3);
        assert_eq!(log.timespan(), TemporalInterval::new(3, 5));
        // Sorted by timestamp: post(3), follow(4), like(5).
        assert_eq!(log.events()[0].kind, ActionKind::Post);
        assert_eq!(log.events()[1].kind, ActionKind::Follow);
        assert_eq!(log.events()[2].kind, ActionKind::Like);
        let alice = log.nodes().get("alice").unwrap();
        let p1 = log.posts().get("p1").unwrap();
        assert_eq!(log.posts().produced(p1), Some((alice, 3)));
    }

    #[test]
    fn like_without_target_is_parse_error() {
        let csv = "actor,kind,target_node,target_post,timestamp\n\
                   alice,post,,p1,3\n\
                   bob,like,,p1,5\n";
        let err = ingest_events(csv.as_bytes()).unwrap_err();
        match err {
            Error::Parse { line, msg } => {
                assert_eq!(line, 3);
                assert!(msg.contains("target node"), "msg: {msg}");
            }
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn post_with_target_node_is_parse_error() {
        let csv = "actor,kind,target_node,target_post,timestamp\n\
                   alice,post,bob,p1,3\n";
        assert!(matches!(
            ingest_events(csv.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn negative_timestamp_rejected() {
        let csv = "actor,kind,target_node,target_post,timestamp\n\
                   alice,post,,p1,-1\n";
        assert!(matches!(
            ingest_events(csv.as_bytes()),
            Err(Error::Parse { line: 2, .. })
        ));
    }

    #[test]
    fn empty_source_is_error() {
        let csv = "actor,kind,target_node,target_post,timestamp\n";
        assert!(matches!(ingest_events(csv.as_bytes()), Err(Error::EmptyInput)));
    }

    #[test]
    fn wrong_header_is_error() {
        let csv = "who,what,where,which,when\nalice,post,,p1,3\n";
        assert!(matches!(
            ingest_events(csv.as_bytes()),
            Err(Error::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn unsorted_input_is_sorted_with_stable_ties() {
        let csv = "actor,kind,target_node,target_post,timestamp\n\
                   a,post,,x1,9\n\
                   b,post,,x2,2\n\
                   c,post,,x3,9\n";
        let log = ingest_events(csv.as_bytes()).unwrap();
        let order: Vec<i64> = log.events().iter().map(|e| e.timestamp).collect();
        assert_eq!(order, vec![2, 9, 9]);
        // Tie between a(9) and c(9) keeps input order: a first.
        assert_eq!(log.nodes().label(log.events()[1].actor), "a");
        assert_eq!(log.nodes().label(log.events()[2].actor), "c");
    }

    #[test]
    fn duplicate_rows_are_kept() {
        let csv = "actor,kind,target_node,target_post,timestamp\n\
                   b,like,a,p1,5\n\
                   b,like,a,p1,5\n";
        let log = ingest_events(csv.as_bytes()).unwrap();
        assert_eq!(log.len(), 2);
    }

    #[test]
    fn csv_round_trip_is_identity_on_canonical_form() {
        let log = ingest_events(small_csv().as_bytes()).unwrap();
        let canonical = log.to_csv();
        let log2 = ingest_events(canonical.as_bytes()).unwrap();
        assert_eq!(log2.to_csv(), canonical);
        assert_eq!(log2.kind_counts(), log.kind_counts());
        assert_eq!(log2.timespan(), log.timespan());
    }

    #[test]
    fn actions_of_unknown_node_errors() {
        let log = ingest_events(small_csv().as_bytes()).unwrap();
        assert!(log.actions_of(NodeId(99)).is_err());
        let bob = log.nodes().get("bob").unwrap();
        let acts = log.actions_of(bob).unwrap();
        assert_eq!(acts.len(), 1);
        assert_eq!(log.events()[acts[0]].kind, ActionKind::Like);
    }
}
