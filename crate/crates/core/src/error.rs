//! Crate-wide error type.

use crate::event::NodeId;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("parse error at line {line}: {msg}")]
    Parse { line: u64, msg: String },

    #[error("input contains no events")]
    EmptyInput,

    #[error("unknown node `{0}`")]
    UnknownNode(String),

    #[error("node {0} not registered in the event log")]
    UnknownNodeId(NodeId),

    #[error("node {0} not present in snapshot")]
    NodeNotInSnapshot(NodeId),

    #[error("empty activity series")]
    EmptySeries,

    #[error("invalid parameter `{field}`: {msg}")]
    InvalidParameter { field: &'static str, msg: String },

    #[error("snapshot graph is empty")]
    EmptySnapshot,

    #[error("ranking lists do not cover the same node set")]
    MismatchedRankings,

    #[error("ranking list too short: need at least {min} entries, got {got}")]
    ListTooShort { min: usize, got: usize },

    #[error("k = {k} out of range 1..={max}")]
    KOutOfRange { k: usize, max: usize },

    #[error("denominator set is empty")]
    EmptyDenominator,

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("insufficient samples: need {need}, got {got}")]
    InsufficientSamples { need: usize, got: usize },

    #[error("feature table has no entry for a snapshot subject")]
    MissingFeature,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
