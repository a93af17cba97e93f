//! Temporal graph toolkit for detecting and ranking lurkers in online social
//! networks.
//!
//! The crate ingests timestamped followship/interaction event logs, builds
//! transient and cumulative snapshot graphs, computes freshness and
//! activity-trend features, ranks nodes by how much they consume relative to
//! what they produce (time-unaware, time-static and time-evolving variants),
//! and evaluates rankings against an action-count reference with rank
//! correlation and top-k overlap metrics. A set of behavioral analyses covers
//! category overlaps, preferential attachment, responsiveness latencies and
//! fuzzy clustering of score trajectories.

pub mod analysis;
pub mod error;
pub mod eval;
pub mod event;
pub mod features;
pub mod rank;
pub mod snapshot;
pub mod synth;

pub use error::{Error, Result};
pub use event::{
    ingest_events, ActionEvent, ActionKind, EventLog, EventLogBuilder, NodeId, TemporalInterval,
};
pub use features::{
    activity_series, average_activity, cumulative_series, dsa_transform, freshness_kernel,
    interaction_freshness, user_freshness, ActivitySeries, ActivitySubject, CumulativeScoreTable,
    DsaParams, DsaSeries, NormalizationMode, SnapshotFeatures,
};
pub use rank::{
    edge_weight, lurker_rank, node_weight, te_lurker_rank, ts_lurker_rank, Algorithm, RankVector,
    RankerConfig, WeightSet,
};
pub use snapshot::{
    build_snapshot, smoothed_degrees, EdgePolicy, SnapshotGraph, SnapshotMode, SnapshotSpec,
};
