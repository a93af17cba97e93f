//! Batch CLI for ranking lurkers in temporal interaction networks: ingest a
//! timestamped event CSV, build snapshot graphs, rank with the time-unaware,
//! time-static and time-evolving rankers, evaluate against the action-count
//! reference, and run the behavioral analyses. All outputs are files.

mod config;
mod pipeline;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use lurkrank::rank::Algorithm;

use config::RunConfig;
use pipeline::{run_pipeline, Pipeline};

#[derive(Parser)]
#[command(
    name = "lurkrank",
    version,
    about = "Rank lurkers in temporal social-interaction logs",
    after_help = "Input CSV header: actor,kind,target_node,target_post,timestamp\n\
                  Kinds: post, favorite, like, comment, follow; timestamps are integer days."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse, validate and canonicalize an event log (events.csv, nodes.csv).
    Ingest(CommonArgs),
    /// Materialize snapshot edge lists for the configured mode.
    Snapshot {
        #[command(flatten)]
        common: CommonArgs,
        /// Only this window index (all covering windows when omitted).
        #[arg(long)]
        index: Option<usize>,
    },
    /// Score one ranking algorithm per window and write node,score,rank files.
    Rank {
        #[command(flatten)]
        common: CommonArgs,
        /// lr and dd rank the configured mode's graphs; ts-lr is transient,
        /// te-lr cumulative.
        #[arg(long, value_parser = ["lr", "ts-lr", "te-lr", "dd"])]
        algo: String,
        /// Only this window index.
        #[arg(long)]
        index: Option<usize>,
    },
    /// Compare lr/ts-lr/te-lr against the data-driven reference ranking.
    Eval(CommonArgs),
    /// Run one behavioral analysis.
    Analyze {
        #[command(flatten)]
        common: CommonArgs,
        /// One of: overlap, newcomers, prefattach, responsiveness, cluster.
        #[arg(value_parser = config::ANALYSES)]
        analysis: String,
    },
    /// Full pipeline: ingest, snapshots, all rankers, eval, analyses.
    Run(CommonArgs),
}

/// Options shared by every subcommand. Unset flags fall back to the config
/// file (when given), then to the documented defaults.
#[derive(Args)]
struct CommonArgs {
    /// Input event CSV.
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output directory for all reports [default: out].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Flat `key = value` config file; explicit flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Snapshot mode [default: transient].
    #[arg(long, value_parser = ["transient", "cumulative"])]
    mode: Option<String>,
    /// Snapshot window length in days [default: 28].
    #[arg(long)]
    interval_days: Option<i64>,
    /// Window origin day [default: first event day].
    #[arg(long)]
    start_day: Option<i64>,
    /// Which events induce edges [default: all].
    #[arg(long, value_parser = ["all", "interactions", "follows"])]
    edge_policy: Option<String>,
    /// Ranker damping factor [default: 0.85].
    #[arg(long)]
    damping: Option<f64>,
    /// Freshness coefficient in the weighting scheme [default: 0.5].
    #[arg(long)]
    omega_f: Option<f64>,
    /// Activity coefficient in the weighting scheme [default: 0.5].
    #[arg(long)]
    omega_a: Option<f64>,
    /// Convergence tolerance (L1 score change) [default: 1e-9].
    #[arg(long)]
    tolerance: Option<f64>,
    /// Ranker iteration cap [default: 200].
    #[arg(long)]
    max_iter: Option<usize>,
    /// Fraction defining top-lurker / bottom-active sets [default: 0.25].
    #[arg(long)]
    top_frac: Option<f64>,
    /// Fraction of the list length used as the prefix-overlap depth
    /// [default: 0.25].
    #[arg(long)]
    k_frac: Option<f64>,
    /// Trend segmentation threshold [default: half the derivative's std dev].
    #[arg(long)]
    dsa_epsilon: Option<f64>,
    /// Count comments in the data-driven reference [default: false].
    #[arg(long)]
    include_comments: bool,
    /// Normalize cumulative scores by the all-time maximum instead of the
    /// running maximum [default: false].
    #[arg(long)]
    acausal_norm: bool,
    /// Zero-contributor test restricted to each window instead of the whole
    /// history up to its end [default: false].
    #[arg(long)]
    zc_window_scope: bool,
    /// Cluster count for the trend clustering [default: 4].
    #[arg(long)]
    clusters: Option<usize>,
    /// Fuzzifier for the trend clustering [default: 1.25].
    #[arg(long)]
    fuzzifier: Option<f64>,
    /// Objective-improvement stop for the clustering [default: 1e-9].
    #[arg(long)]
    fcm_tolerance: Option<f64>,
    /// Iteration cap for the clustering [default: 200].
    #[arg(long)]
    fcm_max_iter: Option<usize>,
    /// Responsiveness latency horizon in days [default: 90].
    #[arg(long)]
    horizon: Option<i64>,
    /// Week length for the attachment analysis [default: 7].
    #[arg(long)]
    week_days: Option<i64>,
    /// Minimum snapshot presence for clustered series [default: 0.5].
    #[arg(long)]
    min_presence: Option<f64>,
    /// Seed for all stochastic steps [default: 0].
    #[arg(long)]
    seed: Option<u64>,
    /// Parallel workers for per-window ranking [default: 1].
    #[arg(long)]
    jobs: Option<usize>,
    /// Comma-separated analyses for `run` [default: overlap,newcomers].
    #[arg(long)]
    analyses: Option<String>,
    /// Also write the per-user feature audit table [default: false].
    #[arg(long)]
    dump_features: bool,
}

impl CommonArgs {
    fn resolve(&self) -> Result<RunConfig, config::ConfigError> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &self.config {
            cfg.apply_file(path)?;
        }
        if let Some(v) = &self.input {
            cfg.input = v.clone();
        }
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        if let Some(v) = &self.mode {
            cfg.set("mode", v)?;
        }
        if let Some(v) = self.interval_days {
            cfg.interval_days = v;
        }
        if let Some(v) = self.start_day {
            cfg.start_day = Some(v);
        }
        if let Some(v) = &self.edge_policy {
            cfg.set("edge_policy", v)?;
        }
        if let Some(v) = self.damping {
            cfg.damping = v;
        }
        if let Some(v) = self.omega_f {
            cfg.omega_f = v;
        }
        if let Some(v) = self.omega_a {
            cfg.omega_a = v;
        }
        if let Some(v) = self.tolerance {
            cfg.tolerance = v;
        }
        if let Some(v) = self.max_iter {
            cfg.max_iter = v;
        }
        if let Some(v) = self.top_frac {
            cfg.top_frac = v;
        }
        if let Some(v) = self.k_frac {
            cfg.k_frac = v;
        }
        if let Some(v) = self.dsa_epsilon {
            cfg.dsa_epsilon = Some(v);
        }
        if self.include_comments {
            cfg.include_comments = true;
        }
        if self.acausal_norm {
            cfg.acausal_norm = true;
        }
        if self.zc_window_scope {
            cfg.zc_window_scope = true;
        }
        if let Some(v) = self.clusters {
            cfg.clusters = v;
        }
        if let Some(v) = self.fuzzifier {
            cfg.fuzzifier = v;
        }
        if let Some(v) = self.fcm_tolerance {
            cfg.fcm_tolerance = v;
        }
        if let Some(v) = self.fcm_max_iter {
            cfg.fcm_max_iter = v;
        }
        if let Some(v) = self.horizon {
            cfg.horizon = v;
        }
        if let Some(v) = self.week_days {
            cfg.week_days = v;
        }
        if let Some(v) = self.min_presence {
            cfg.min_presence = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = v;
        }
        if let Some(v) = self.jobs {
            cfg.jobs = v;
        }
        if let Some(v) = &self.analyses {
            cfg.set("analyses", v)?;
        }
        if self.dump_features {
            cfg.dump_features = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

type Action = Box<dyn FnOnce(RunConfig) -> Result<(), pipeline::StageError>>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let (common, action): (&CommonArgs, Action) = match &cli.command {
        Command::Run(common) => (common, Box::new(run_pipeline)),
        Command::Ingest(common) => (
            common,
            Box::new(|cfg| {
                let p = Pipeline::load(cfg)?;
                p.stage_ingest()?;
                println!(
                    "ingested {} events, {} nodes, days {}..={} -> {}",
                    p.log.len(),
                    p.log.nodes().len(),
                    p.log.timespan().start,
                    p.log.timespan().end,
                    p.cfg.out.display()
                );
                Ok(())
            }),
        ),
        Command::Snapshot { common, index } => {
            let index = *index;
            (
                common,
                Box::new(move |cfg| {
                    let p = Pipeline::load(cfg)?;
                    p.stage_snapshots(index)?;
                    println!("wrote snapshots -> {}", p.cfg.out.display());
                    Ok(())
                }),
            )
        }
        Command::Rank { common, algo, index } => {
            let algorithm = Algorithm::parse(algo).expect("validated by clap");
            let index = *index;
            (
                common,
                Box::new(move |cfg| {
                    let p = Pipeline::load(cfg)?;
                    p.rank_single(algorithm, index)?;
                    println!("wrote rankings -> {}", p.cfg.out.display());
                    Ok(())
                }),
            )
        }
        Command::Eval(common) => (
            common,
            Box::new(|cfg| {
                let p = Pipeline::load(cfg)?;
                let ranks = p.compute_ranks()?;
                p.stage_eval(&ranks)?;
                println!("wrote eval.csv -> {}", p.cfg.out.display());
                Ok(())
            }),
        ),
        Command::Analyze { common, analysis } => {
            let analysis = analysis.clone();
            (
                common,
                Box::new(move |cfg| {
                    let p = Pipeline::load(cfg)?;
                    let ranks = match analysis.as_str() {
                        "prefattach" | "responsiveness" => Vec::new(),
                        _ => p.compute_ranks()?,
                    };
                    p.stage_analysis(&analysis, &ranks)?;
                    println!("wrote analysis `{analysis}` -> {}", p.cfg.out.display());
                    Ok(())
                }),
            )
        }
    };

    let cfg = match common.resolve() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(1);
        }
    };
    let out = cfg.out.clone();
    match action(cfg) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{e}");
            // Keep a machine-readable trace next to any completed outputs.
            // The full pipeline writes a richer manifest itself; don't
            // clobber it.
            let path = out.join("errors.json");
            if !path.exists() {
                let manifest = serde_json::json!({
                    "failed_stage": e.stage,
                    "error": e.message,
                });
                let _ = pipeline::write_report(
                    &path,
                    &format!("{}\n", serde_json::to_string_pretty(&manifest).unwrap()),
                );
            }
            ExitCode::from(1)
        }
    }
}
