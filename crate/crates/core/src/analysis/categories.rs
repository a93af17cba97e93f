//! User categories per snapshot and overlap ratios between them.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::event::{EventLog, NodeId, TemporalInterval};
use crate::eval::RankingList;
use crate::rank::RankVector;
use crate::snapshot::SnapshotGraph;

/// Scope of the zero-contributor test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZeroContributorScope {
    /// No contribution in the whole history up to the window end.
    UpToWindowEnd,
    /// No contribution inside the window itself.
    WindowOnly,
}

/// Category sets derived from one snapshot and its ranking.
#[derive(Debug, Clone)]
pub struct UserCategorySnapshot {
    pub index: usize,
    pub window: TemporalInterval,
    /// Nodes with raw in/out-degree ratio above one, or sinks with inbound
    /// edges.
    pub potential_lurkers: BTreeSet<NodeId>,
    /// Nodes that never posted, commented, or gave a favorite/like mark.
    pub zero_contributors: BTreeSet<NodeId>,
    /// Nodes whose first involvement in any event falls inside the window.
    pub newcomers: BTreeSet<NodeId>,
    /// Top `ceil(p * |V|)` nodes of the ranking.
    pub top_lurkers: BTreeSet<NodeId>,
    /// Bottom `ceil(p * |V|)` nodes of the ranking.
    pub bottom_actives: BTreeSet<NodeId>,
}

/// Populate all category sets for `graph` using `rank` for the top/bottom
/// selections. Newcomer detection consults the full log before the window;
/// the zero-contributor scope is configurable.
pub fn classify_users(
    log: &EventLog,
    graph: &SnapshotGraph,
    rank: &RankVector,
    p: f64,
    scope: ZeroContributorScope,
) -> Result<UserCategorySnapshot> {
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::InvalidParameter {
            field: "p",
            msg: format!("fraction must be in (0, 1], got {p}"),
        });
    }
    let window = graph.window();

    let mut potential_lurkers = BTreeSet::new();
    for (local, &node) in graph.nodes().iter().enumerate() {
        let (inn, out) = graph.raw_degrees_at(local);
        let lurking = if out == 0 { inn > 0 } else { inn > out };
        if lurking {
            potential_lurkers.insert(node);
        }
    }

    let contribution_window = match scope {
        ZeroContributorScope::UpToWindowEnd => TemporalInterval::new(i64::MIN + 1, window.end),
        ZeroContributorScope::WindowOnly => window,
    };
    let mut contributors = vec![false; log.nodes().len()];
    let mut first_involvement = vec![i64::MAX; log.nodes().len()];
    for ev in log.events() {
        let mark_first = |node: NodeId, first: &mut Vec<i64>| {
            let slot = &mut first[node.0 as usize];
            *slot = (*slot).min(ev.timestamp);
        };
        mark_first(ev.actor, &mut first_involvement);
        if let Some(t) = ev.target_node {
            mark_first(t, &mut first_involvement);
        }
        if (ev.kind.is_production() || ev.kind.is_consumption())
            && contribution_window.contains(ev.timestamp)
        {
            contributors[ev.actor.0 as usize] = true;
        }
    }

    let mut zero_contributors = BTreeSet::new();
    let mut newcomers = BTreeSet::new();
    for &node in graph.nodes() {
        if !contributors[node.0 as usize] {
            zero_contributors.insert(node);
        }
        if window.contains(first_involvement[node.0 as usize]) {
            newcomers.insert(node);
        }
    }

    let ranking = RankingList::from_vector(rank);
    let top_lurkers: BTreeSet<NodeId> = ranking.top_fraction(p).iter().copied().collect();
    let bottom_actives: BTreeSet<NodeId> = ranking.bottom_fraction(p).iter().copied().collect();

    Ok(UserCategorySnapshot {
        index: graph.spec().index,
        window,
        potential_lurkers,
        zero_contributors,
        newcomers,
        top_lurkers,
        bottom_actives,
    })
}

/// Which argument supplies the denominator of the overlap ratio.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OverlapDenominator {
    A,
    B,
}

/// `|A intersect B| / |denominator set|`; the denominator set must be
/// non-empty.
pub fn overlap_ratio(
    a: &BTreeSet<NodeId>,
    b: &BTreeSet<NodeId>,
    denom: OverlapDenominator,
) -> Result<f64> {
    let denom_len = match denom {
        OverlapDenominator::A => a.len(),
        OverlapDenominator::B => b.len(),
    };
    if denom_len == 0 {
        return Err(Error::EmptyDenominator);
    }
    let inter = a.intersection(b).count();
    Ok(inter as f64 / denom_len as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::event::{ActionKind, EventLogBuilder};
    use crate::rank::{lurker_rank, RankerConfig};
    use crate::snapshot::{build_snapshot, EdgePolicy, SnapshotMode, SnapshotSpec};

    fn ids(log: &crate::event::EventLog, labels: &[&str]) -> BTreeSet<NodeId> {
        labels
            .iter()
            .map(|l| log.nodes().get(l).unwrap())
            .collect()
    }

    fn classify_fixture(
        extra_late_event: bool,
    ) -> (crate::event::EventLog, UserCategorySnapshot) {
        let mut b = EventLogBuilder::new();
        // prod posts early and is consumed by sink (3 in, 0 out after follows).
        b.push("prod", ActionKind::Post, None, Some("p1"), 0).unwrap();
        b.push("sink", ActionKind::Follow, Some("prod"), None, 1).unwrap();
        b.push("sink2", ActionKind::Follow, Some("prod"), None, 1).unwrap();
        b.push("even", ActionKind::Follow, Some("prod"), None, 2).unwrap();
        b.push("prod", ActionKind::Follow, Some("even"), None, 2).unwrap();
        // fan favorites inside the window: a contributor.
        b.push("fan", ActionKind::Favorite, Some("prod"), Some("p1"), 3)
            .unwrap();
        // late joiner first appears in the second window.
        b.push("late", ActionKind::Follow, Some("prod"), None, 30).unwrap();
        if extra_late_event {
            b.push("sink", ActionKind::Follow, Some("fan"), None, 40).unwrap();
        }
        let log = b.build().unwrap();
        let spec = SnapshotSpec::new(SnapshotMode::Transient, 28, 0, 0).unwrap();
        let g = build_snapshot(&log, spec, EdgePolicy::All);
        let rank = lurker_rank(&g, &RankerConfig::default()).unwrap();
        let cats =
            classify_users(&log, &g, &rank, 0.25, ZeroContributorScope::UpToWindowEnd).unwrap();
        (log, cats)
    }

    #[test]
    fn sinks_and_excess_consumers_are_potential_lurkers() {
        let (log, cats) = classify_fixture(false);
        // sink/sink2/fan consume without being consumed; "even" has in = out = 1.
        assert_eq!(
            cats.potential_lurkers,
            ids(&log, &["sink", "sink2", "fan"])
        );
    }

    #[test]
    fn ratio_exactly_one_is_not_a_potential_lurker() {
        let (log, cats) = classify_fixture(false);
        let even = log.nodes().get("even").unwrap();
        assert!(!cats.potential_lurkers.contains(&even));
    }

    #[test]
    fn zero_contributors_exclude_posters_and_reactors() {
        let (log, cats) = classify_fixture(false);
        // prod posted; fan gave a favorite. Follows do not count as contributions.
        assert_eq!(
            cats.zero_contributors,
            ids(&log, &["sink", "sink2", "even"])
        );
    }

    #[test]
    fn first_event_inside_window_means_newcomer() {
        let (log, cats) = classify_fixture(false);
        // Everyone in window 0 first appears there; "late" is not in the graph.
        assert!(cats.newcomers.contains(&log.nodes().get("fan").unwrap()));
        assert!(!cats.newcomers.contains(&log.nodes().get("late").unwrap_or(NodeId(u32::MAX))));
    }

    #[test]
    fn categories_ignore_events_after_window_end() {
        let (_, without) = classify_fixture(false);
        let (_, with) = classify_fixture(true);
        assert_eq!(without.potential_lurkers, with.potential_lurkers);
        assert_eq!(without.zero_contributors, with.zero_contributors);
        assert_eq!(without.newcomers, with.newcomers);
    }

    #[test]
    fn top_and_bottom_sizes_are_ceil() {
        let (_, cats) = classify_fixture(false);
        // 6 nodes in window 0, ceil(0.25 * 6) = 2.
        assert_eq!(cats.top_lurkers.len(), 2);
        assert_eq!(cats.bottom_actives.len(), 2);
    }

    #[test]
    fn invalid_fraction_is_rejected() {
        let mut b = EventLogBuilder::new();
        b.push("a", ActionKind::Follow, Some("bb"), None, 0).unwrap();
        let log = b.build().unwrap();
        let spec = SnapshotSpec::new(SnapshotMode::Transient, 28, 0, 0).unwrap();
        let g = build_snapshot(&log, spec, EdgePolicy::All);
        let rank = lurker_rank(&g, &RankerConfig::default()).unwrap();
        for p in [0.0, 1.5, -0.1] {
            assert!(classify_users(&log, &g, &rank, p, ZeroContributorScope::UpToWindowEnd)
                .is_err());
        }
    }

    #[test]
    fn window_scope_resets_contributions() {
        let mut b = EventLogBuilder::new();
        b.push("u", ActionKind::Post, None, Some("p"), 0).unwrap();
        b.push("u", ActionKind::Follow, Some("w"), None, 40).unwrap();
        b.push("w", ActionKind::Post, None, Some("q"), 40).unwrap();
        let log = b.build().unwrap();
        let spec = SnapshotSpec::new(SnapshotMode::Transient, 28, 0, 1).unwrap();
        let g = build_snapshot(&log, spec, EdgePolicy::All);
        let rank = lurker_rank(&g, &RankerConfig::default()).unwrap();
        let u = log.nodes().get("u").unwrap();
        let cumulative =
            classify_users(&log, &g, &rank, 0.5, ZeroContributorScope::UpToWindowEnd).unwrap();
        assert!(!cumulative.zero_contributors.contains(&u));
        let windowed =
            classify_users(&log, &g, &rank, 0.5, ZeroContributorScope::WindowOnly).unwrap();
        // u only followed inside window 1; its post was in window 0.
        assert!(windowed.zero_contributors.contains(&u));
    }

    #[test]
    fn overlap_ratio_basics() {
        let a: BTreeSet<NodeId> = [1, 2, 3].iter().map(|&i| NodeId(i)).collect();
        let b: BTreeSet<NodeId> = [2, 3, 4, 5, 6].iter().map(|&i| NodeId(i)).collect();
        assert_eq!(overlap_ratio(&a, &a, OverlapDenominator::A).unwrap(), 1.0);
        assert_eq!(overlap_ratio(&a, &b, OverlapDenominator::B).unwrap(), 0.4);
        let disjoint: BTreeSet<NodeId> = [9].iter().map(|&i| NodeId(i)).collect();
        assert_eq!(
            overlap_ratio(&a, &disjoint, OverlapDenominator::A).unwrap(),
            0.0
        );
        let empty = BTreeSet::new();
        assert!(matches!(
            overlap_ratio(&a, &empty, OverlapDenominator::B),
            Err(Error::EmptyDenominator)
        ));
    }
}
