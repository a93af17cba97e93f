//! Behavioral analyses over snapshots and rankings: user categories and
//! their overlaps, preferential attachment, power-law fitting, responsiveness
//! latencies, and fuzzy clustering of score trajectories.

pub mod categories;
pub mod clustering;
pub mod ecdf;
pub mod powerlaw;
pub mod prefattach;

pub use categories::{
    classify_users, overlap_ratio, OverlapDenominator, UserCategorySnapshot, ZeroContributorScope,
};
pub use clustering::{
    build_score_series, cluster_lurking_series, FcmParams, FuzzyClustering, ScoreTimeSeries,
};
pub use ecdf::{responsiveness_ecdf, Ecdf};
pub use powerlaw::{power_law_fit, PowerLawFit, XMin};
pub use prefattach::{
    preferential_attachment_series, PrefAttachMode, PrefAttachResult, WeekCategories,
};
