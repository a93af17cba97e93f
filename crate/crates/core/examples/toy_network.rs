//! Rank a small hand-built interaction network and print the three ranker
//! variants side by side.
//!
//! Run with: `cargo run --example toy_network`

use lurkrank::event::{ActionKind, EventLogBuilder};
use lurkrank::features::{CumulativeScoreTable, DsaParams, NormalizationMode, SnapshotFeatures};
use lurkrank::rank::{lurker_rank, te_lurker_rank, ts_lurker_rank, RankerConfig, WeightSet};
use lurkrank::snapshot::{build_snapshot, EdgePolicy, SnapshotMode, SnapshotSpec};

fn main() {
    let mut b = EventLogBuilder::new();
    // Two producers posting over eight weeks.
    for (author, day) in [("ada", 0), ("ada", 10), ("ada", 35), ("ben", 3), ("ben", 44)] {
        b.push(author, ActionKind::Post, None, Some(&format!("{author}-{day}")), day)
            .unwrap();
    }
    // Three consumers with different appetites.
    for day in [1, 5, 12, 13, 36, 40, 47, 52] {
        b.push("lia", ActionKind::Favorite, Some("ada"), Some("ada-0"), day)
            .unwrap();
    }
    for day in [4, 6, 45] {
        b.push("mo", ActionKind::Like, Some("ben"), Some("ben-3"), day).unwrap();
    }
    b.push("mo", ActionKind::Post, None, Some("mo-20"), 20).unwrap();
    b.push("nia", ActionKind::Follow, Some("ada"), None, 2).unwrap();
    b.push("nia", ActionKind::Follow, Some("ben"), None, 30).unwrap();
    let log = b.build().unwrap();

    let cfg = RankerConfig::default();
    let dsa = DsaParams::default();
    let spec = SnapshotSpec::new(SnapshotMode::Cumulative, 28, 0, 1).unwrap();
    let graph = build_snapshot(&log, spec, EdgePolicy::All);

    let base = lurker_rank(&graph, &cfg).unwrap();
    let features = SnapshotFeatures::compute(&log, &graph, &dsa).unwrap();
    let weights = WeightSet::from_features(&graph, &features, &cfg);
    let time_static = ts_lurker_rank(&graph, &weights, &cfg).unwrap();
    let table = CumulativeScoreTable::build(
        &log,
        &graph,
        &spec.sub_intervals(),
        &dsa,
        NormalizationMode::Causal,
    )
    .unwrap();
    let time_evolving = te_lurker_rank(&graph, &table, &cfg).unwrap();

    println!(
        "{} nodes, {} edges, days {}..={}\n",
        graph.node_count(),
        graph.edge_count(),
        graph.window().start,
        graph.window().end
    );
    println!("{:<6} {:>10} {:>10} {:>10}", "node", "lr", "ts-lr", "te-lr");
    for (node, score) in base.sorted_entries() {
        println!(
            "{:<6} {:>10.6} {:>10.6} {:>10.6}",
            log.nodes().label(node),
            score,
            time_static.score(node).unwrap(),
            time_evolving.score(node).unwrap(),
        );
    }
}
