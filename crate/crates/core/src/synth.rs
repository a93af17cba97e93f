//! Seeded synthetic event-log generation for tests, demos and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::event::{ActionKind, EventLog, EventLogBuilder};

/// Shape of a generated log.
#[derive(Debug, Clone, Copy)]
pub struct SynthConfig {
    pub users: usize,
    /// Days are drawn from `0..days`; the first and last day always carry a
    /// post so the log's timespan is exactly `[0, days - 1]`.
    pub days: i64,
    /// Exact number of events produced.
    pub events: usize,
    pub seed: u64,
}

impl Default for SynthConfig {
    fn default() -> Self {
        SynthConfig {
            users: 120,
            days: 196,
            events: 10_000,
            seed: 0,
        }
    }
}

/// Generate a log with a producer/consumer population mix: a quarter of the
/// users post content, the rest follow producers early and react to their
/// posts with geometric response latencies. Deterministic for a fixed seed.
pub fn generate_log(cfg: &SynthConfig) -> EventLog {
    assert!(cfg.users >= 4, "need at least 4 users");
    assert!(cfg.days >= 2, "need at least 2 days");
    assert!(cfg.events >= 8, "need at least 8 events");
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let producers: Vec<String> = (0..cfg.users.div_ceil(4))
        .map(|i| format!("prod{i:04}"))
        .collect();
    let consumers: Vec<String> = (0..cfg.users - producers.len())
        .map(|i| format!("user{i:04}"))
        .collect();

    let follow_budget = (cfg.events / 10).max(1);
    let post_budget = (cfg.events / 4).max(2);
    let consume_budget = cfg.events - follow_budget - post_budget;

    let mut b = EventLogBuilder::new();

    // Followships land early so later reactions qualify as responsive.
    let follow_horizon = (cfg.days / 8).max(1);
    for _ in 0..follow_budget {
        let consumer = consumers.choose(&mut rng).unwrap();
        let producer = producers.choose(&mut rng).unwrap();
        let day = rng.gen_range(0..follow_horizon);
        b.push(consumer, ActionKind::Follow, Some(producer), None, day)
            .unwrap();
    }

    // Posts cover the whole span; pin the first and last day.
    let mut posts: Vec<(String, String, i64)> = Vec::with_capacity(post_budget);
    for i in 0..post_budget {
        let producer = producers.choose(&mut rng).unwrap().clone();
        let day = match i {
            0 => 0,
            1 => cfg.days - 1,
            _ => rng.gen_range(0..cfg.days),
        };
        let pid = format!("p{i:06}");
        b.push(&producer, ActionKind::Post, None, Some(&pid), day)
            .unwrap();
        posts.push((producer, pid, day));
    }

    // Reactions target random posts after a geometric latency.
    for _ in 0..consume_budget {
        let (author, pid, posted) = posts.choose(&mut rng).unwrap();
        let consumer = consumers.choose(&mut rng).unwrap();
        let mut latency = 0i64;
        while latency < 60 && rng.gen::<f64>() > 0.3 {
            latency += 1;
        }
        let day = (posted + latency).min(cfg.days - 1);
        let kind = match rng.gen_range(0..10) {
            0..=4 => ActionKind::Favorite,
            5..=7 => ActionKind::Like,
            _ => ActionKind::Comment,
        };
        b.push(consumer, kind, Some(author), Some(pid), day).unwrap();
    }

    b.build().expect("generated log is non-empty")
}
