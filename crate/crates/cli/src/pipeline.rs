//! Pipeline stages: ingest, snapshot, rank, eval, analyze, and the full run.
//!
//! Every stage writes deterministic UTF-8 CSV/JSON reports under the output
//! directory; a fixed seed makes reruns byte-identical. Stage failures leave
//! completed outputs in place and surface a machine-readable error manifest.

use std::collections::BTreeSet;
use std::fs;
use std::io::Write as _;
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use lurkrank::analysis::{
    build_score_series, classify_users, cluster_lurking_series, overlap_ratio,
    preferential_attachment_series, responsiveness_ecdf, FcmParams, OverlapDenominator,
    PrefAttachMode, UserCategorySnapshot, WeekCategories, ZeroContributorScope,
};
use lurkrank::eval::{
    data_driven_rank, fagin_intersection, fraction_depth, kendall_tau, DdConfig, NormalizeMethod,
    RankingList,
};
use lurkrank::event::{EventLog, NodeId, TemporalInterval};
use lurkrank::features::{
    CumulativeScoreTable, DsaParams, NormalizationMode, SnapshotFeatures,
};
use lurkrank::rank::{
    lurker_rank, te_lurker_rank, ts_lurker_rank, Algorithm, RankVector, WeightSet,
};
use lurkrank::snapshot::{build_snapshot, SnapshotGraph, SnapshotMode, SnapshotSpec};
use serde::Serialize;

use crate::config::RunConfig;

#[derive(Debug)]
pub struct StageError {
    pub stage: &'static str,
    pub message: String,
}

impl std::fmt::Display for StageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "stage `{}` failed: {}", self.stage, self.message)
    }
}

impl std::error::Error for StageError {}

fn stage_err(stage: &'static str, e: impl std::fmt::Display) -> StageError {
    StageError {
        stage,
        message: e.to_string(),
    }
}

pub fn write_report(path: &Path, contents: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        fs::create_dir_all(parent)?;
    }
    let mut file = fs::File::create(path)?;
    file.write_all(contents.as_bytes())
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable report");
    text.push('\n');
    text
}

/// Shared state for all stages: the ingested log plus window geometry.
pub struct Pipeline {
    pub cfg: RunConfig,
    pub log: EventLog,
    pub start: i64,
    pub window_count: usize,
}

impl Pipeline {
    pub fn load(cfg: RunConfig) -> Result<Self, StageError> {
        let file = fs::File::open(&cfg.input)
            .map_err(|e| stage_err("ingest", format!("{}: {e}", cfg.input.display())))?;
        let log = lurkrank::ingest_events(std::io::BufReader::new(file))
            .map_err(|e| stage_err("ingest", e))?;
        let start = cfg.start_day.unwrap_or(log.timespan().start);
        let window_count =
            SnapshotSpec::count_covering(log.timespan(), start, cfg.interval_days);
        Ok(Pipeline {
            cfg,
            log,
            start,
            window_count,
        })
    }

    pub fn spec(&self, mode: SnapshotMode, index: usize) -> SnapshotSpec {
        SnapshotSpec::new(mode, self.cfg.interval_days, self.start, index)
            .expect("validated interval length")
    }

    pub fn graph(&self, mode: SnapshotMode, index: usize) -> SnapshotGraph {
        build_snapshot(&self.log, self.spec(mode, index), self.cfg.policy())
    }

    fn dsa(&self) -> DsaParams {
        DsaParams {
            epsilon: self.cfg.dsa_epsilon,
        }
    }

    fn norm_mode(&self) -> NormalizationMode {
        if self.cfg.acausal_norm {
            NormalizationMode::Acausal
        } else {
            NormalizationMode::Causal
        }
    }

    fn dd_config(&self) -> DdConfig {
        DdConfig {
            include_comments: self.cfg.include_comments,
        }
    }

    /// Cumulative feature table over the full snapshot sequence.
    pub fn cumulative_table(&self) -> Result<CumulativeScoreTable, StageError> {
        let last = self.graph(SnapshotMode::Cumulative, self.window_count - 1);
        let intervals = self.spec(SnapshotMode::Cumulative, self.window_count - 1).sub_intervals();
        CumulativeScoreTable::build(&self.log, &last, &intervals, &self.dsa(), self.norm_mode())
            .map_err(|e| stage_err("features", e))
    }

    // -- ingest ------------------------------------------------------------

    pub fn stage_ingest(&self) -> Result<(), StageError> {
        let out = &self.cfg.out;
        write_report(&out.join("events.csv"), &self.log.to_csv())
            .map_err(|e| stage_err("ingest", e))?;
        write_report(&out.join("nodes.csv"), &self.log.nodes_csv())
            .map_err(|e| stage_err("ingest", e))?;
        Ok(())
    }

    // -- snapshots -----------------------------------------------------------

    pub fn stage_snapshots(&self, only: Option<usize>) -> Result<(), StageError> {
        let mode = self.cfg.snapshot_mode();
        for index in self.indices(only)? {
            let g = self.graph(mode, index);
            let name = format!("snapshots/{}_{index:03}.csv", mode.as_str());
            write_report(&self.cfg.out.join(name), &g.edge_csv(self.log.nodes()))
                .map_err(|e| stage_err("snapshot", e))?;
        }
        Ok(())
    }

    fn indices(&self, only: Option<usize>) -> Result<Vec<usize>, StageError> {
        match only {
            None => Ok((0..self.window_count).collect()),
            Some(i) if i < self.window_count => Ok(vec![i]),
            Some(i) => Err(stage_err(
                "snapshot",
                format!("index {i} out of range 0..{}", self.window_count),
            )),
        }
    }

    // -- ranking -------------------------------------------------------------

    /// The three ranker variants per window: the base ranker on the configured
    /// mode's graph, the time-static ranker on the transient graph, the
    /// time-evolving ranker on the cumulative graph.
    pub fn compute_ranks(&self) -> Result<Vec<IndexRanks>, StageError> {
        let table = self.cumulative_table()?;
        let results: Mutex<Vec<Option<IndexRanks>>> =
            Mutex::new((0..self.window_count).map(|_| None).collect());
        let next = AtomicUsize::new(0);
        let workers = self.cfg.jobs.min(self.window_count).max(1);
        let failure: Mutex<Option<StageError>> = Mutex::new(None);
        std::thread::scope(|scope| {
            for _ in 0..workers {
                scope.spawn(|| loop {
                    let index = next.fetch_add(1, Ordering::Relaxed);
                    if index >= self.window_count {
                        break;
                    }
                    match self.rank_index(index, &table) {
                        Ok(ranks) => results.lock().unwrap()[index] = Some(ranks),
                        Err(e) => {
                            failure.lock().unwrap().get_or_insert(e);
                            break;
                        }
                    }
                });
            }
        });
        if let Some(e) = failure.into_inner().unwrap() {
            return Err(e);
        }
        Ok(results
            .into_inner()
            .unwrap()
            .into_iter()
            .map(|r| r.expect("all indices ranked"))
            .collect())
    }

    fn rank_index(
        &self,
        index: usize,
        table: &CumulativeScoreTable,
    ) -> Result<IndexRanks, StageError> {
        let fail = |e: lurkrank::Error| stage_err("rank", e);
        let cfg = self.cfg.ranker();
        let primary = self.graph(self.cfg.snapshot_mode(), index);
        let transient = self.graph(SnapshotMode::Transient, index);
        let cumulative = self.graph(SnapshotMode::Cumulative, index);

        let lr = (!primary.is_empty())
            .then(|| lurker_rank(&primary, &cfg))
            .transpose()
            .map_err(fail)?;
        let ts = if transient.is_empty() {
            None
        } else {
            let features =
                SnapshotFeatures::compute(&self.log, &transient, &self.dsa()).map_err(fail)?;
            let weights = WeightSet::from_features(&transient, &features, &cfg);
            Some(ts_lurker_rank(&transient, &weights, &cfg).map_err(fail)?)
        };
        let te = (!cumulative.is_empty())
            .then(|| te_lurker_rank(&cumulative, table, &cfg))
            .transpose()
            .map_err(fail)?;

        for rank in [&lr, &ts, &te].into_iter().flatten() {
            if !rank.converged {
                log::warn!(
                    "{} did not converge on window {index} (residual {:.3e})",
                    rank.algorithm.as_str(),
                    rank.residual
                );
            }
        }
        Ok(IndexRanks {
            index,
            primary,
            transient,
            cumulative,
            lr,
            ts,
            te,
        })
    }

    pub fn stage_ranks(&self, ranks: &[IndexRanks]) -> Result<(), StageError> {
        for bundle in ranks {
            for rank in bundle.present() {
                let mode = rank.spec.mode.as_str();
                let base = format!(
                    "ranks/rank_{}_{}_{:03}",
                    rank.algorithm.as_str(),
                    mode,
                    bundle.index
                );
                write_report(
                    &self.cfg.out.join(format!("{base}.csv")),
                    &rank.to_csv(self.log.nodes()),
                )
                .map_err(|e| stage_err("rank", e))?;
                write_report(
                    &self.cfg.out.join(format!("{base}.json")),
                    &format!("{}\n", rank.to_json(self.log.nodes())),
                )
                .map_err(|e| stage_err("rank", e))?;
            }
        }
        if self.cfg.dump_features {
            let table = self.cumulative_table()?;
            write_report(
                &self.cfg.out.join("features.csv"),
                &table.features_csv(self.log.nodes()),
            )
            .map_err(|e| stage_err("rank", e))?;
        }
        Ok(())
    }

    /// Rank one algorithm across windows and write its report files.
    /// `lr` and `dd` run on the configured mode's graphs; `ts-lr` is defined
    /// on transient graphs and `te-lr` on cumulative ones.
    pub fn rank_single(
        &self,
        algorithm: Algorithm,
        only: Option<usize>,
    ) -> Result<(), StageError> {
        let fail = |e: lurkrank::Error| stage_err("rank", e);
        let cfg = self.cfg.ranker();
        let table = match algorithm {
            Algorithm::TeLr => Some(self.cumulative_table()?),
            _ => None,
        };
        for index in self.indices(only)? {
            let graph = match algorithm {
                Algorithm::TsLr => self.graph(SnapshotMode::Transient, index),
                Algorithm::TeLr => self.graph(SnapshotMode::Cumulative, index),
                _ => self.graph(self.cfg.snapshot_mode(), index),
            };
            if graph.is_empty() {
                log::warn!("window {index} is empty; skipping");
                continue;
            }
            let rank = match algorithm {
                Algorithm::Lr => lurker_rank(&graph, &cfg).map_err(fail)?,
                Algorithm::TsLr => {
                    let features =
                        SnapshotFeatures::compute(&self.log, &graph, &self.dsa()).map_err(fail)?;
                    let weights = WeightSet::from_features(&graph, &features, &cfg);
                    ts_lurker_rank(&graph, &weights, &cfg).map_err(fail)?
                }
                Algorithm::TeLr => {
                    te_lurker_rank(&graph, table.as_ref().expect("table built"), &cfg)
                        .map_err(fail)?
                }
                Algorithm::Dd => data_driven_rank(&self.log, &graph, &self.dd_config()),
            };
            let base = format!(
                "ranks/rank_{}_{}_{index:03}",
                algorithm.as_str(),
                graph.spec().mode.as_str()
            );
            write_report(
                &self.cfg.out.join(format!("{base}.csv")),
                &rank.to_csv(self.log.nodes()),
            )
            .map_err(|e| stage_err("rank", e))?;
            write_report(
                &self.cfg.out.join(format!("{base}.json")),
                &format!("{}\n", rank.to_json(self.log.nodes())),
            )
            .map_err(|e| stage_err("rank", e))?;
        }
        if self.cfg.dump_features {
            let table = match table {
                Some(t) => t,
                None => self.cumulative_table()?,
            };
            write_report(
                &self.cfg.out.join("features.csv"),
                &table.features_csv(self.log.nodes()),
            )
            .map_err(|e| stage_err("rank", e))?;
        }
        Ok(())
    }

    // -- evaluation ----------------------------------------------------------

    pub fn stage_eval(&self, ranks: &[IndexRanks]) -> Result<(), StageError> {
        let mut csv = String::from("snapshot_end,algorithm,kendall_tau,fagin_at_25\n");
        for bundle in ranks {
            for (rank, graph) in [
                (&bundle.lr, &bundle.primary),
                (&bundle.ts, &bundle.transient),
                (&bundle.te, &bundle.cumulative),
            ] {
                let Some(rank) = rank else { continue };
                if graph.node_count() < 2 {
                    log::warn!(
                        "window {} too small for rank comparison; skipping {}",
                        bundle.index,
                        rank.algorithm.as_str()
                    );
                    continue;
                }
                let reference = data_driven_rank(&self.log, graph, &self.dd_config());
                let left = RankingList::from_vector(rank);
                let right = RankingList::from_vector(&reference);
                let tau = kendall_tau(&left, &right).map_err(|e| stage_err("eval", e))?;
                let k = fraction_depth(left.len(), self.cfg.k_frac);
                let fagin =
                    fagin_intersection(&left, &right, k).map_err(|e| stage_err("eval", e))?;
                csv.push_str(&format!(
                    "{},{},{},{}\n",
                    graph.window().end,
                    rank.algorithm.as_str(),
                    tau,
                    fagin
                ));
            }
        }
        write_report(&self.cfg.out.join("eval.csv"), &csv).map_err(|e| stage_err("eval", e))
    }

    // -- analyses ------------------------------------------------------------

    pub fn stage_analysis(&self, name: &str, ranks: &[IndexRanks]) -> Result<(), StageError> {
        match name {
            "overlap" => self.analysis_overlap(ranks),
            "newcomers" => self.analysis_newcomers(ranks),
            "prefattach" => self.analysis_prefattach(),
            "responsiveness" => self.analysis_responsiveness(),
            "cluster" => self.analysis_cluster(ranks),
            other => Err(stage_err("analyze", format!("unknown analysis `{other}`"))),
        }
    }

    fn categories(&self, bundle: &IndexRanks) -> Option<UserCategorySnapshot> {
        let rank = bundle.lr.as_ref()?;
        let scope = if self.cfg.zc_window_scope {
            ZeroContributorScope::WindowOnly
        } else {
            ZeroContributorScope::UpToWindowEnd
        };
        classify_users(&self.log, &bundle.primary, rank, self.cfg.top_frac, scope).ok()
    }

    fn analysis_overlap(&self, ranks: &[IndexRanks]) -> Result<(), StageError> {
        #[derive(Serialize)]
        struct Row {
            snapshot_end: i64,
            zero_contributors: usize,
            potential_lurkers: usize,
            top_lurkers: usize,
            overlap_vs_potential: Option<f64>,
            overlap_vs_top: Option<f64>,
        }
        let mut rows = Vec::new();
        for bundle in ranks {
            let Some(cats) = self.categories(bundle) else { continue };
            let vs_potential = overlap_ratio(
                &cats.zero_contributors,
                &cats.potential_lurkers,
                OverlapDenominator::B,
            )
            .ok();
            let vs_top = overlap_ratio(
                &cats.zero_contributors,
                &cats.top_lurkers,
                OverlapDenominator::B,
            )
            .ok();
            rows.push(Row {
                snapshot_end: cats.window.end,
                zero_contributors: cats.zero_contributors.len(),
                potential_lurkers: cats.potential_lurkers.len(),
                top_lurkers: cats.top_lurkers.len(),
                overlap_vs_potential: vs_potential,
                overlap_vs_top: vs_top,
            });
        }
        let mut csv = String::from(
            "snapshot_end,zero_contributors,potential_lurkers,top_lurkers,overlap_vs_potential,overlap_vs_top\n",
        );
        for r in &rows {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.snapshot_end,
                r.zero_contributors,
                r.potential_lurkers,
                r.top_lurkers,
                opt(r.overlap_vs_potential),
                opt(r.overlap_vs_top)
            ));
        }
        self.write_analysis("overlap", &csv, &rows)
    }

    fn analysis_newcomers(&self, ranks: &[IndexRanks]) -> Result<(), StageError> {
        #[derive(Serialize)]
        struct Row {
            snapshot_end: i64,
            newcomers: usize,
            top_lurkers: usize,
            shared: usize,
            newcomers_lurking: Option<f64>,
            lurkers_newcoming: Option<f64>,
        }
        let mut rows = Vec::new();
        for bundle in ranks {
            let Some(cats) = self.categories(bundle) else { continue };
            let shared = cats.newcomers.intersection(&cats.top_lurkers).count();
            rows.push(Row {
                snapshot_end: cats.window.end,
                newcomers: cats.newcomers.len(),
                top_lurkers: cats.top_lurkers.len(),
                shared,
                newcomers_lurking: overlap_ratio(
                    &cats.newcomers,
                    &cats.top_lurkers,
                    OverlapDenominator::A,
                )
                .ok(),
                lurkers_newcoming: overlap_ratio(
                    &cats.newcomers,
                    &cats.top_lurkers,
                    OverlapDenominator::B,
                )
                .ok(),
            });
        }
        let mut csv = String::from(
            "snapshot_end,newcomers,top_lurkers,shared,newcomers_lurking,lurkers_newcoming\n",
        );
        for r in &rows {
            csv.push_str(&format!(
                "{},{},{},{},{},{}\n",
                r.snapshot_end,
                r.newcomers,
                r.top_lurkers,
                r.shared,
                opt(r.newcomers_lurking),
                opt(r.lurkers_newcoming)
            ));
        }
        self.write_analysis("newcomers", &csv, &rows)
    }

    fn weekly_categories(&self) -> (Vec<TemporalInterval>, Vec<WeekCategories>) {
        let weeks = SnapshotSpec::count_covering(self.log.timespan(), self.start, self.cfg.week_days);
        let mut windows = Vec::with_capacity(weeks);
        let mut categories = Vec::with_capacity(weeks);
        for w in 0..weeks {
            let transient =
                SnapshotSpec::new(SnapshotMode::Transient, self.cfg.week_days, self.start, w)
                    .expect("validated week length");
            windows.push(transient.window());
            let spec =
                SnapshotSpec::new(SnapshotMode::Cumulative, self.cfg.week_days, self.start, w)
                    .expect("validated week length");
            let g = build_snapshot(&self.log, spec, self.cfg.policy());
            let cats = if g.is_empty() {
                WeekCategories::default()
            } else {
                match lurker_rank(&g, &self.cfg.ranker()) {
                    Ok(rank) => {
                        let list = RankingList::from_vector(&rank);
                        WeekCategories {
                            lurkers: list.top_fraction(self.cfg.top_frac).iter().copied().collect(),
                            actives: list
                                .bottom_fraction(self.cfg.top_frac)
                                .iter()
                                .copied()
                                .collect(),
                        }
                    }
                    Err(_) => WeekCategories::default(),
                }
            };
            categories.push(cats);
        }
        (windows, categories)
    }

    fn analysis_prefattach(&self) -> Result<(), StageError> {
        let (windows, categories) = self.weekly_categories();
        if windows.len() < 2 {
            return Err(stage_err(
                "analyze",
                "preferential attachment needs at least two weekly windows",
            ));
        }
        #[derive(Serialize)]
        struct ModeReport {
            mode: &'static str,
            slope: Option<f64>,
            intercept: Option<f64>,
            correlation: Option<f64>,
            observations: Option<usize>,
            error: Option<String>,
        }
        let mut reports = Vec::new();
        for (mode, tag) in [
            (PrefAttachMode::ReceivedByActive, "received"),
            (PrefAttachMode::ProducedByLurkers, "produced"),
        ] {
            match preferential_attachment_series(
                &self.log,
                &windows,
                &categories,
                mode,
                self.cfg.policy(),
            ) {
                Ok(result) => {
                    let mut csv = String::from("k,avg_new_links\n");
                    for (k, avg) in &result.points {
                        csv.push_str(&format!("{k},{avg}\n"));
                    }
                    write_report(
                        &self.cfg.out.join(format!("analysis/prefattach_{tag}.csv")),
                        &csv,
                    )
                    .map_err(|e| stage_err("analyze", e))?;
                    reports.push(ModeReport {
                        mode: tag,
                        slope: Some(result.slope),
                        intercept: Some(result.intercept),
                        correlation: Some(result.correlation),
                        observations: Some(result.observations),
                        error: None,
                    });
                }
                Err(e) => reports.push(ModeReport {
                    mode: tag,
                    slope: None,
                    intercept: None,
                    correlation: None,
                    observations: None,
                    error: Some(e.to_string()),
                }),
            }
        }
        if reports.iter().all(|r| r.error.is_some()) {
            return Err(stage_err(
                "analyze",
                format!(
                    "preferential attachment failed in both modes: {}",
                    reports[0].error.as_deref().unwrap_or("unknown")
                ),
            ));
        }
        write_report(
            &self.cfg.out.join("analysis/prefattach.json"),
            &to_json(&reports),
        )
        .map_err(|e| stage_err("analyze", e))
    }

    fn analysis_responsiveness(&self) -> Result<(), StageError> {
        let all: BTreeSet<NodeId> = self.log.nodes().ids().collect();
        // Lurker group from the ranking over the whole history.
        let last = self.graph(SnapshotMode::Cumulative, self.window_count - 1);
        let lurkers: BTreeSet<NodeId> = if last.is_empty() {
            BTreeSet::new()
        } else {
            match lurker_rank(&last, &self.cfg.ranker()) {
                Ok(rank) => RankingList::from_vector(&rank)
                    .top_fraction(self.cfg.top_frac)
                    .iter()
                    .copied()
                    .collect(),
                Err(_) => BTreeSet::new(),
            }
        };
        #[derive(Serialize)]
        struct GroupReport {
            group: &'static str,
            members: usize,
            samples: usize,
            empty: bool,
        }
        let mut summaries = Vec::new();
        for (group, tag) in [(&all, "all"), (&lurkers, "lurkers")] {
            let ecdf = responsiveness_ecdf(&self.log, group, self.cfg.horizon);
            let mut csv = String::from("latency_days,cumulative_fraction\n");
            for (latency, fraction) in &ecdf.points {
                csv.push_str(&format!("{latency},{fraction}\n"));
            }
            write_report(
                &self.cfg.out.join(format!("analysis/responsiveness_{tag}.csv")),
                &csv,
            )
            .map_err(|e| stage_err("analyze", e))?;
            if ecdf.is_empty() {
                log::warn!("responsiveness: no qualifying latencies for group `{tag}`");
            }
            summaries.push(GroupReport {
                group: tag,
                members: group.len(),
                samples: ecdf.samples,
                empty: ecdf.is_empty(),
            });
        }
        write_report(
            &self.cfg.out.join("analysis/responsiveness.json"),
            &to_json(&summaries),
        )
        .map_err(|e| stage_err("analyze", e))
    }

    fn analysis_cluster(&self, ranks: &[IndexRanks]) -> Result<(), StageError> {
        let vectors: Vec<RankVector> = ranks
            .iter()
            .filter_map(|b| b.lr.clone())
            .collect();
        if vectors.len() < 2 {
            return Err(stage_err(
                "analyze",
                "clustering needs at least two snapshots with rankings",
            ));
        }
        // Candidates: top-ranked lurkers of the first snapshot, kept when they
        // appear in at least `min_presence` of the subsequent snapshots.
        let first = RankingList::from_vector(&vectors[0]);
        let later = &vectors[1..];
        let candidates: Vec<NodeId> = first
            .top_fraction(self.cfg.top_frac)
            .iter()
            .copied()
            .filter(|&node| {
                let present = later.iter().filter(|r| r.score(node).is_some()).count();
                present as f64 >= self.cfg.min_presence * later.len() as f64
            })
            .collect();
        let series = build_score_series(&vectors, &candidates, 0.0, NormalizeMethod::MinMax);
        if series.len() <= self.cfg.clusters {
            return Err(stage_err(
                "analyze",
                format!(
                    "clustering needs more than {} eligible series, found {}",
                    self.cfg.clusters,
                    series.len()
                ),
            ));
        }
        let params = FcmParams {
            clusters: self.cfg.clusters,
            fuzzifier: self.cfg.fuzzifier,
            tolerance: self.cfg.fcm_tolerance,
            max_iter: self.cfg.fcm_max_iter,
            seed: self.cfg.seed,
        };
        let clustering =
            cluster_lurking_series(&series, &params).map_err(|e| stage_err("analyze", e))?;
        let mut csv = String::from("node,top_cluster");
        for j in 0..params.clusters {
            csv.push_str(&format!(",membership_{j}"));
        }
        csv.push('\n');
        let assignments = clustering.hard_assignments();
        for (i, s) in series.iter().enumerate() {
            csv.push_str(self.log.nodes().label(s.node));
            csv.push_str(&format!(",{}", assignments[i]));
            for j in 0..params.clusters {
                csv.push_str(&format!(",{}", clustering.memberships[i][j]));
            }
            csv.push('\n');
        }
        write_report(&self.cfg.out.join("analysis/clusters.csv"), &csv)
            .map_err(|e| stage_err("analyze", e))?;
        #[derive(Serialize)]
        struct ClusterReport<'a> {
            series: usize,
            clusters: usize,
            fuzzifier: f64,
            iterations: usize,
            objective: f64,
            centroids: &'a [Vec<f64>],
        }
        write_report(
            &self.cfg.out.join("analysis/clusters.json"),
            &to_json(&ClusterReport {
                series: series.len(),
                clusters: params.clusters,
                fuzzifier: params.fuzzifier,
                iterations: clustering.iterations,
                objective: clustering.objective,
                centroids: &clustering.centroids,
            }),
        )
        .map_err(|e| stage_err("analyze", e))
    }

    fn write_analysis<T: Serialize>(
        &self,
        name: &str,
        csv: &str,
        rows: &[T],
    ) -> Result<(), StageError> {
        write_report(&self.cfg.out.join(format!("analysis/{name}.csv")), csv)
            .map_err(|e| stage_err("analyze", e))?;
        write_report(&self.cfg.out.join(format!("analysis/{name}.json")), &to_json(&rows))
            .map_err(|e| stage_err("analyze", e))
    }
}

fn opt(v: Option<f64>) -> String {
    v.map_or(String::new(), |x| x.to_string())
}

/// Rank vectors of one window (absent when the respective graph is empty).
pub struct IndexRanks {
    pub index: usize,
    pub primary: SnapshotGraph,
    pub transient: SnapshotGraph,
    pub cumulative: SnapshotGraph,
    pub lr: Option<RankVector>,
    pub ts: Option<RankVector>,
    pub te: Option<RankVector>,
}

impl IndexRanks {
    pub fn present(&self) -> impl Iterator<Item = &RankVector> {
        [&self.lr, &self.ts, &self.te].into_iter().flatten()
    }
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: &'a RunConfig,
    config_hash: String,
    seed: u64,
    events: usize,
    nodes: usize,
    timespan: TemporalInterval,
    windows: usize,
    stages: Vec<String>,
}

#[derive(Serialize)]
struct ErrorManifest<'a> {
    failed_stage: &'a str,
    error: &'a str,
    completed_stages: &'a [String],
}

/// Execute the whole pipeline. On failure the error manifest is written and
/// completed stage outputs are retained.
pub fn run_pipeline(cfg: RunConfig) -> Result<(), StageError> {
    let mut completed: Vec<String> = Vec::new();
    let result = run_stages(&cfg, &mut completed);
    if let Err(e) = &result {
        let manifest = ErrorManifest {
            failed_stage: e.stage,
            error: &e.message,
            completed_stages: &completed,
        };
        let _ = write_report(&cfg.out.join("errors.json"), &to_json(&manifest));
    }
    result
}

fn run_stages(cfg: &RunConfig, completed: &mut Vec<String>) -> Result<(), StageError> {
    let pipeline = Pipeline::load(cfg.clone())?;
    pipeline.stage_ingest()?;
    completed.push("ingest".into());
    println!(
        "ingested {} events, {} nodes, days {}..={}",
        pipeline.log.len(),
        pipeline.log.nodes().len(),
        pipeline.log.timespan().start,
        pipeline.log.timespan().end
    );

    pipeline.stage_snapshots(None)?;
    completed.push("snapshot".into());
    println!("wrote {} {} snapshots", pipeline.window_count, cfg.mode);

    let ranks = pipeline.compute_ranks()?;
    pipeline.stage_ranks(&ranks)?;
    completed.push("rank".into());
    println!("ranked {} windows (lr, ts-lr, te-lr)", ranks.len());

    pipeline.stage_eval(&ranks)?;
    completed.push("eval".into());
    println!("wrote eval.csv");

    for analysis in &cfg.analyses {
        pipeline.stage_analysis(analysis, &ranks)?;
        completed.push(format!("analyze:{analysis}"));
        println!("wrote analysis `{analysis}`");
    }

    let manifest = Manifest {
        config: &pipeline.cfg,
        config_hash: pipeline.cfg.config_hash(),
        seed: pipeline.cfg.seed,
        events: pipeline.log.len(),
        nodes: pipeline.log.nodes().len(),
        timespan: pipeline.log.timespan(),
        windows: pipeline.window_count,
        stages: completed.clone(),
    };
    write_report(&cfg.out.join("manifest.json"), &to_json(&manifest))
        .map_err(|e| stage_err("manifest", e))?;
    println!("run complete: {}", cfg.out.display());
    Ok(())
}
