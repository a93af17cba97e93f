//! Run configuration: defaults, flat key=value config files, flag overrides,
//! validation, and the provenance hash.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use lurkrank::snapshot::{EdgePolicy, SnapshotMode};
use lurkrank::rank::RankerConfig;
use serde::Serialize;
use sha2::{Digest, Sha256};

pub const ANALYSES: [&str; 5] = [
    "overlap",
    "newcomers",
    "prefattach",
    "responsiveness",
    "cluster",
];

/// Fully resolved pipeline configuration.
#[derive(Debug, Clone, Serialize)]
pub struct RunConfig {
    pub input: PathBuf,
    #[serde(skip)]
    pub out: PathBuf,
    pub mode: String,
    pub interval_days: i64,
    /// Window origin; the log's first event day when unset.
    pub start_day: Option<i64>,
    pub edge_policy: String,
    pub damping: f64,
    pub omega_f: f64,
    pub omega_a: f64,
    pub tolerance: f64,
    pub max_iter: usize,
    pub top_frac: f64,
    pub k_frac: f64,
    pub dsa_epsilon: Option<f64>,
    pub include_comments: bool,
    pub acausal_norm: bool,
    pub zc_window_scope: bool,
    pub clusters: usize,
    pub fuzzifier: f64,
    pub fcm_tolerance: f64,
    pub fcm_max_iter: usize,
    pub horizon: i64,
    pub week_days: i64,
    pub min_presence: f64,
    pub seed: u64,
    pub jobs: usize,
    pub analyses: Vec<String>,
    pub dump_features: bool,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            input: PathBuf::new(),
            out: PathBuf::from("out"),
            mode: "transient".into(),
            interval_days: 28,
            start_day: None,
            edge_policy: "all".into(),
            damping: 0.85,
            omega_f: 0.5,
            omega_a: 0.5,
            tolerance: 1e-9,
            max_iter: 200,
            top_frac: 0.25,
            k_frac: 0.25,
            dsa_epsilon: None,
            include_comments: false,
            acausal_norm: false,
            zc_window_scope: false,
            clusters: 4,
            fuzzifier: 1.25,
            fcm_tolerance: 1e-9,
            fcm_max_iter: 200,
            horizon: 90,
            week_days: 7,
            min_presence: 0.5,
            seed: 0,
            jobs: 1,
            analyses: vec!["overlap".into(), "newcomers".into()],
            dump_features: false,
        }
    }
}

#[derive(Debug)]
pub struct ConfigError {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "invalid config field `{}`: {}", self.field, self.message)
    }
}

impl std::error::Error for ConfigError {}

fn err(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.into(),
        message: message.into(),
    }
}

impl RunConfig {
    pub fn snapshot_mode(&self) -> SnapshotMode {
        match self.mode.as_str() {
            "cumulative" => SnapshotMode::Cumulative,
            _ => SnapshotMode::Transient,
        }
    }

    pub fn policy(&self) -> EdgePolicy {
        match self.edge_policy.as_str() {
            "interactions" => EdgePolicy::InteractionOnly,
            "follows" => EdgePolicy::FollowshipOnly,
            _ => EdgePolicy::All,
        }
    }

    pub fn ranker(&self) -> RankerConfig {
        RankerConfig {
            damping: self.damping,
            omega_f: self.omega_f,
            omega_a: self.omega_a,
            tolerance: self.tolerance,
            max_iterations: self.max_iter,
        }
    }

    /// Apply one `key = value` pair from a config file or override.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), ConfigError> {
        fn parse<T: std::str::FromStr>(field: &str, value: &str) -> Result<T, ConfigError> {
            value
                .parse()
                .map_err(|_| err(field, format!("cannot parse `{value}`")))
        }
        match key {
            "input" => self.input = PathBuf::from(value),
            "out" => self.out = PathBuf::from(value),
            "mode" => match value {
                "transient" | "cumulative" => self.mode = value.into(),
                _ => return Err(err(key, "expected `transient` or `cumulative`")),
            },
            "interval_days" => self.interval_days = parse(key, value)?,
            "start_day" => self.start_day = Some(parse(key, value)?),
            "edge_policy" => match value {
                "all" | "interactions" | "follows" => self.edge_policy = value.into(),
                _ => return Err(err(key, "expected `all`, `interactions` or `follows`")),
            },
            "damping" => self.damping = parse(key, value)?,
            "omega_f" => self.omega_f = parse(key, value)?,
            "omega_a" => self.omega_a = parse(key, value)?,
            "tolerance" => self.tolerance = parse(key, value)?,
            "max_iter" => self.max_iter = parse(key, value)?,
            "top_frac" => self.top_frac = parse(key, value)?,
            "k_frac" => self.k_frac = parse(key, value)?,
            "dsa_epsilon" => self.dsa_epsilon = Some(parse(key, value)?),
            "include_comments" => self.include_comments = parse(key, value)?,
            "acausal_norm" => self.acausal_norm = parse(key, value)?,
            "zc_window_scope" => self.zc_window_scope = parse(key, value)?,
            "clusters" => self.clusters = parse(key, value)?,
            "fuzzifier" => self.fuzzifier = parse(key, value)?,
            "fcm_tolerance" => self.fcm_tolerance = parse(key, value)?,
            "fcm_max_iter" => self.fcm_max_iter = parse(key, value)?,
            "horizon" => self.horizon = parse(key, value)?,
            "week_days" => self.week_days = parse(key, value)?,
            "min_presence" => self.min_presence = parse(key, value)?,
            "seed" => self.seed = parse(key, value)?,
            "jobs" => self.jobs = parse(key, value)?,
            "analyses" => {
                self.analyses = value
                    .split(',')
                    .map(|s| s.trim().to_string())
                    .filter(|s| !s.is_empty())
                    .collect()
            }
            "dump_features" => self.dump_features = parse(key, value)?,
            _ => return Err(err(key, "unknown configuration key")),
        }
        Ok(())
    }

    /// Load `key = value` lines (# comments allowed) over the defaults.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), ConfigError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| err("config", format!("cannot read {}: {e}", path.display())))?;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(err(
                    "config",
                    format!("line {}: expected `key = value`", lineno + 1),
                ));
            };
            self.set(key.trim(), value.trim())?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.input.as_os_str().is_empty() {
            return Err(err("input", "an input event CSV is required"));
        }
        if self.interval_days <= 0 {
            return Err(err("interval_days", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.damping) {
            return Err(err("damping", "must be in [0, 1]"));
        }
        if self.omega_f < 0.0 || self.omega_a < 0.0 || self.omega_f + self.omega_a <= 0.0 {
            return Err(err("omega_f/omega_a", "must be non-negative with a positive sum"));
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return Err(err("tolerance", "must be positive"));
        }
        if self.max_iter == 0 {
            return Err(err("max_iter", "must be at least 1"));
        }
        for (name, frac) in [("top_frac", self.top_frac), ("k_frac", self.k_frac)] {
            if frac.is_nan() || frac <= 0.0 || frac > 1.0 {
                return Err(err(name, "must be in (0, 1]"));
            }
        }
        if let Some(eps) = self.dsa_epsilon {
            if eps < 0.0 {
                return Err(err("dsa_epsilon", "must be non-negative"));
            }
        }
        if self.clusters < 2 {
            return Err(err("clusters", "must be at least 2"));
        }
        if self.fuzzifier.is_nan() || self.fuzzifier <= 1.0 {
            return Err(err("fuzzifier", "must be greater than 1"));
        }
        if self.fcm_tolerance.is_nan() || self.fcm_tolerance <= 0.0 {
            return Err(err("fcm_tolerance", "must be positive"));
        }
        if self.fcm_max_iter == 0 {
            return Err(err("fcm_max_iter", "must be at least 1"));
        }
        if self.horizon < 0 {
            return Err(err("horizon", "must be non-negative"));
        }
        if self.week_days <= 0 {
            return Err(err("week_days", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.min_presence) {
            return Err(err("min_presence", "must be in [0, 1]"));
        }
        if self.jobs == 0 {
            return Err(err("jobs", "must be at least 1"));
        }
        for analysis in &self.analyses {
            if !ANALYSES.contains(&analysis.as_str()) {
                return Err(err(
                    "analyses",
                    format!("unknown analysis `{analysis}` (known: {})", ANALYSES.join(", ")),
                ));
            }
        }
        Ok(())
    }

    /// Canonical `key = value` listing (output directory excluded, so reruns
    /// into different directories hash identically).
    pub fn canonical_string(&self) -> String {
        let mut map: BTreeMap<&str, String> = BTreeMap::new();
        map.insert("input", self.input.display().to_string());
        map.insert("mode", self.mode.clone());
        map.insert("interval_days", self.interval_days.to_string());
        map.insert(
            "start_day",
            self.start_day.map_or("auto".into(), |d| d.to_string()),
        );
        map.insert("edge_policy", self.edge_policy.clone());
        map.insert("damping", self.damping.to_string());
        map.insert("omega_f", self.omega_f.to_string());
        map.insert("omega_a", self.omega_a.to_string());
        map.insert("tolerance", self.tolerance.to_string());
        map.insert("max_iter", self.max_iter.to_string());
        map.insert("top_frac", self.top_frac.to_string());
        map.insert("k_frac", self.k_frac.to_string());
        map.insert(
            "dsa_epsilon",
            self.dsa_epsilon.map_or("auto".into(), |e| e.to_string()),
        );
        map.insert("include_comments", self.include_comments.to_string());
        map.insert("acausal_norm", self.acausal_norm.to_string());
        map.insert("zc_window_scope", self.zc_window_scope.to_string());
        map.insert("clusters", self.clusters.to_string());
        map.insert("fuzzifier", self.fuzzifier.to_string());
        map.insert("fcm_tolerance", self.fcm_tolerance.to_string());
        map.insert("fcm_max_iter", self.fcm_max_iter.to_string());
        map.insert("horizon", self.horizon.to_string());
        map.insert("week_days", self.week_days.to_string());
        map.insert("min_presence", self.min_presence.to_string());
        map.insert("seed", self.seed.to_string());
        map.insert("analyses", self.analyses.join(","));
        map.insert("dump_features", self.dump_features.to_string());
        let mut out = String::new();
        for (key, value) in map {
            let _ = writeln!(out, "{key} = {value}");
        }
        out
    }

    pub fn config_hash(&self) -> String {
        let digest = Sha256::digest(self.canonical_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
