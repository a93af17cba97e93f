//! Fixed-point rankers: the base ranker plus its time-static and
//! time-evolving variants.
//!
//! All three share one synchronous (Jacobi) iteration scheme over a snapshot
//! graph, started from the uniform vector and stopped when the L1 change
//! falls under the configured tolerance. The time-aware variants scale the
//! in- and out-neighbor terms by node weights and damp them by
//! `exp(-sum of incident edge weights)`; the base ranker is the special case
//! of neutral weights (node 1, edge 0). Scores are never renormalized during
//! iteration; a divergence guard aborts if the L1 norm explodes.
//!
//! The update map is monotone with nonnegative coefficients, so iterating
//! from the zero vector converges to the least nonnegative fixed point
//! whenever one exists. When the uniform start fails (it can sit outside the
//! basin of a small fixed point on graphs with strong quadratic coupling),
//! the solver retries from zero; a run that still diverges certifies that
//! the equations have no nonnegative solution, and the result is flagged
//! non-converged.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::event::{NodeId, NodeTable};
use crate::features::{CumulativeScoreTable, SnapshotFeatures};
use crate::snapshot::{SnapshotGraph, SnapshotSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Lr,
    TsLr,
    TeLr,
    Dd,
}

impl Algorithm {
    pub fn as_str(&self) -> &'static str {
        match self {
            Algorithm::Lr => "lr",
            Algorithm::TsLr => "ts-lr",
            Algorithm::TeLr => "te-lr",
            Algorithm::Dd => "dd",
        }
    }

    pub fn parse(s: &str) -> Option<Algorithm> {
        match s {
            "lr" => Some(Algorithm::Lr),
            "ts-lr" => Some(Algorithm::TsLr),
            "te-lr" => Some(Algorithm::TeLr),
            "dd" => Some(Algorithm::Dd),
            _ => None,
        }
    }
}

/// Iteration and weighting parameters shared by the ranker family.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct RankerConfig {
    /// Damping factor in `[0, 1]`.
    pub damping: f64,
    /// Relative importance of freshness in the weighting scheme.
    pub omega_f: f64,
    /// Relative importance of activity trend in the weighting scheme.
    pub omega_a: f64,
    /// Convergence threshold on the L1 norm of the score change.
    pub tolerance: f64,
    pub max_iterations: usize,
}

impl Default for RankerConfig {
    fn default() -> Self {
        RankerConfig {
            damping: 0.85,
            omega_f: 0.5,
            omega_a: 0.5,
            tolerance: 1e-9,
            max_iterations: 200,
        }
    }
}

impl RankerConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |field: &'static str, msg: String| Err(Error::InvalidParameter { field, msg });
        if !(0.0..=1.0).contains(&self.damping) {
            return bad("damping", format!("must be in [0, 1], got {}", self.damping));
        }
        if self.omega_f < 0.0 || self.omega_a < 0.0 {
            return bad("omega", "weighting coefficients must be non-negative".into());
        }
        if self.omega_f + self.omega_a <= 0.0 {
            return bad("omega", "omega_f + omega_a must be positive".into());
        }
        if self.tolerance.is_nan() || self.tolerance <= 0.0 {
            return bad("tolerance", format!("must be positive, got {}", self.tolerance));
        }
        if self.max_iterations == 0 {
            return bad("max_iterations", "must be at least 1".into());
        }
        Ok(())
    }
}

/// Node weighting: blend of freshness `f` and average activity `a` when both
/// are non-zero, `f` alone when activity is zero, and the neutral value 1
/// when freshness is zero.
pub fn node_weight(f: f64, a: f64, cfg: &RankerConfig) -> f64 {
    if f != 0.0 && a != 0.0 {
        (cfg.omega_f * f + cfg.omega_a * a) / (cfg.omega_f + cfg.omega_a)
    } else if f != 0.0 {
        f
    } else {
        1.0
    }
}

/// Edge weighting: same blend as [`node_weight`] but zero when the
/// interaction freshness is zero, so stale edges contribute nothing to the
/// exponential damping terms.
pub fn edge_weight(f: f64, a: f64, cfg: &RankerConfig) -> f64 {
    if f != 0.0 && a != 0.0 {
        (cfg.omega_f * f + cfg.omega_a * a) / (cfg.omega_f + cfg.omega_a)
    } else if f != 0.0 {
        f
    } else {
        0.0
    }
}

/// Node and edge weights aligned with a snapshot's node and edge orders.
#[derive(Debug, Clone)]
pub struct WeightSet {
    pub node: Vec<f64>,
    pub edge: Vec<f64>,
}

impl WeightSet {
    /// Neutral weights: node 1, edge 0. The weighted ranker reduces to the
    /// base formulation under these.
    pub fn neutral(graph: &SnapshotGraph) -> Self {
        WeightSet {
            node: vec![1.0; graph.node_count()],
            edge: vec![0.0; graph.edge_count()],
        }
    }

    /// Apply the weighting functions to transient snapshot features.
    pub fn from_features(
        graph: &SnapshotGraph,
        features: &SnapshotFeatures,
        cfg: &RankerConfig,
    ) -> Self {
        let node = (0..graph.node_count())
            .map(|i| node_weight(features.node_freshness[i], features.node_activity[i], cfg))
            .collect();
        let edge = (0..graph.edge_count())
            .map(|e| edge_weight(features.edge_freshness[e], features.edge_activity[e], cfg))
            .collect();
        WeightSet { node, edge }
    }

    /// Apply the weighting functions to normalized cumulative scores at
    /// sub-interval `index`.
    pub fn from_cumulative(
        graph: &SnapshotGraph,
        table: &CumulativeScoreTable,
        index: usize,
        cfg: &RankerConfig,
    ) -> Result<Self> {
        if index >= table.intervals().len() {
            return Err(Error::InvalidParameter {
                field: "index",
                msg: format!(
                    "cumulative table covers {} intervals, index {index} requested",
                    table.intervals().len()
                ),
            });
        }
        let mut node = Vec::with_capacity(graph.node_count());
        for &n in graph.nodes() {
            let sc = table.node(n).ok_or(Error::MissingFeature)?;
            node.push(node_weight(sc.cf_norm[index], sc.ca_norm[index], cfg));
        }
        let mut edge = Vec::with_capacity(graph.edge_count());
        for e in graph.edges() {
            let u = graph.node_at(e.src);
            let v = graph.node_at(e.dst);
            let sc = table.edge(u, v).ok_or(Error::MissingFeature)?;
            edge.push(edge_weight(sc.cf_norm[index], sc.ca_norm[index], cfg));
        }
        Ok(WeightSet { node, edge })
    }
}

/// Score vector produced by one ranker run on one snapshot.
#[derive(Debug, Clone)]
pub struct RankVector {
    pub algorithm: Algorithm,
    pub spec: SnapshotSpec,
    nodes: Vec<NodeId>,
    scores: Vec<f64>,
    pub iterations: usize,
    /// L1 norm of the last score change (0 for direct scorings).
    pub residual: f64,
    pub converged: bool,
}

impl RankVector {
    pub fn new(
        algorithm: Algorithm,
        spec: SnapshotSpec,
        nodes: Vec<NodeId>,
        scores: Vec<f64>,
        iterations: usize,
        residual: f64,
        converged: bool,
    ) -> Self {
        debug_assert_eq!(nodes.len(), scores.len());
        debug_assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        RankVector {
            algorithm,
            spec,
            nodes,
            scores,
            iterations,
            residual,
            converged,
        }
    }

    /// Nodes in ascending id order, aligned with `scores()`.
    pub fn nodes(&self) -> &[NodeId] {
        &self.nodes
    }

    pub fn scores(&self) -> &[f64] {
        &self.scores
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn score(&self, node: NodeId) -> Option<f64> {
        self.nodes
            .binary_search(&node)
            .ok()
            .map(|i| self.scores[i])
    }

    /// `(node, score)` pairs by descending score, ties broken by node id.
    pub fn sorted_entries(&self) -> Vec<(NodeId, f64)> {
        let mut entries: Vec<(NodeId, f64)> =
            self.nodes.iter().copied().zip(self.scores.iter().copied()).collect();
        entries.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
        entries
    }

    /// CSV `node,score,rank` by descending score.
    pub fn to_csv(&self, table: &NodeTable) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["node", "score", "rank"]).expect("csv header");
        for (rank, (node, score)) in self.sorted_entries().into_iter().enumerate() {
            w.write_record([
                table.label(node),
                &score.to_string(),
                &(rank + 1).to_string(),
            ])
            .expect("csv row");
        }
        String::from_utf8(w.into_inner().expect("csv flush")).expect("csv utf8")
    }

    /// JSON document with convergence metadata and the sorted score list.
    pub fn to_json(&self, table: &NodeTable) -> String {
        #[derive(Serialize)]
        struct Row<'a> {
            node: &'a str,
            score: f64,
            rank: usize,
        }
        #[derive(Serialize)]
        struct Doc<'a> {
            algorithm: Algorithm,
            spec: SnapshotSpec,
            window: crate::event::TemporalInterval,
            iterations: usize,
            residual: f64,
            converged: bool,
            scores: Vec<Row<'a>>,
        }
        let scores = self
            .sorted_entries()
            .into_iter()
            .enumerate()
            .map(|(rank, (node, score))| Row {
                node: table.label(node),
                score,
                rank: rank + 1,
            })
            .collect();
        let doc = Doc {
            algorithm: self.algorithm,
            spec: self.spec,
            window: self.spec.window(),
            iterations: self.iterations,
            residual: self.residual,
            converged: self.converged,
            scores,
        };
        serde_json::to_string_pretty(&doc).expect("json")
    }
}

const DIVERGENCE_GUARD: f64 = 1e12;

fn run_fixed_point(
    graph: &SnapshotGraph,
    weights: &WeightSet,
    cfg: &RankerConfig,
    algorithm: Algorithm,
) -> Result<RankVector> {
    cfg.validate()?;
    if graph.is_empty() {
        return Err(Error::EmptySnapshot);
    }
    let n = graph.node_count();
    assert_eq!(weights.node.len(), n, "node weights misaligned");
    assert_eq!(weights.edge.len(), graph.edge_count(), "edge weights misaligned");

    let mut in_s = Vec::with_capacity(n);
    let mut out_s = Vec::with_capacity(n);
    for v in 0..n {
        let (i, o) = graph.smoothed_degrees_at(v);
        in_s.push(i as f64);
        out_s.push(o as f64);
    }
    let ratio_out_in: Vec<f64> = (0..n).map(|v| out_s[v] / in_s[v]).collect();
    let ratio_in_out: Vec<f64> = (0..n).map(|v| in_s[v] / out_s[v]).collect();

    // Incident edge-weight sums feed the exponential damping terms.
    let mut in_w_sum = vec![0.0f64; n];
    let mut out_w_sum = vec![0.0f64; n];
    for (e, edge) in graph.edges().iter().enumerate() {
        in_w_sum[edge.dst] += weights.edge[e];
        out_w_sum[edge.src] += weights.edge[e];
    }
    let coef_in: Vec<f64> = (0..n)
        .map(|v| (-in_w_sum[v]).exp() / (weights.node[v] * out_s[v]))
        .collect();
    let coef_out: Vec<f64> = (0..n)
        .map(|v| {
            let consumers = graph.out_neighbors(v);
            if consumers.is_empty() {
                return 0.0;
            }
            let denom: f64 = consumers.iter().map(|&u| in_s[u]).sum();
            in_s[v] / (weights.node[v] * denom) * (-out_w_sum[v]).exp()
        })
        .collect();

    let base = (1.0 - cfg.damping) / n as f64;
    let sweep = |start: f64| -> (Vec<f64>, f64, usize, bool) {
        let mut x = vec![start; n];
        let mut next = vec![0.0f64; n];
        let mut residual = f64::INFINITY;
        let mut iterations = 0usize;
        let mut converged = false;
        while iterations < cfg.max_iterations {
            iterations += 1;
            for v in 0..n {
                let mut l_in = 0.0;
                for &u in graph.in_neighbors(v) {
                    l_in += ratio_out_in[u] * x[u];
                }
                l_in *= coef_in[v];
                let mut l_out = 0.0;
                for &u in graph.out_neighbors(v) {
                    l_out += ratio_in_out[u] * x[u];
                }
                l_out *= coef_out[v];
                next[v] = cfg.damping * (l_in * (1.0 + l_out)) + base;
            }
            residual = x
                .iter()
                .zip(next.iter())
                .map(|(a, b)| (a - b).abs())
                .sum();
            std::mem::swap(&mut x, &mut next);
            let norm: f64 = x.iter().map(|s| s.abs()).sum();
            if !norm.is_finite() || norm > DIVERGENCE_GUARD {
                converged = false;
                break;
            }
            if residual <= cfg.tolerance {
                converged = true;
                break;
            }
        }
        (x, residual, iterations, converged)
    };

    let (mut x, mut residual, mut iterations, mut converged) = sweep(1.0 / n as f64);
    if !converged {
        // Monotone rescue: from zero the iterates increase toward the least
        // fixed point, or certify that none exists.
        let (x2, r2, it2, ok2) = sweep(0.0);
        iterations += it2;
        if ok2 {
            x = x2;
            residual = r2;
            converged = true;
        }
    }

    Ok(RankVector::new(
        algorithm,
        graph.spec(),
        graph.nodes().to_vec(),
        x,
        iterations,
        residual,
        converged,
    ))
}

/// Base lurker ranking on the snapshot's structure alone (neutral weights).
pub fn lurker_rank(graph: &SnapshotGraph, cfg: &RankerConfig) -> Result<RankVector> {
    run_fixed_point(graph, &WeightSet::neutral(graph), cfg, Algorithm::Lr)
}

/// Time-static ranking: the base recurrence with node weights scaling the
/// neighbor terms and edge weights damping them exponentially.
pub fn ts_lurker_rank(
    graph: &SnapshotGraph,
    weights: &WeightSet,
    cfg: &RankerConfig,
) -> Result<RankVector> {
    if weights.node.len() != graph.node_count() || weights.edge.len() != graph.edge_count() {
        return Err(Error::MissingFeature);
    }
    run_fixed_point(graph, weights, cfg, Algorithm::TsLr)
}

/// Time-evolving ranking on a cumulative snapshot: identical recurrence to
/// the time-static ranker with normalized cumulative scores substituted into
/// the weighting functions. The sub-interval index is taken from the
/// snapshot's spec.
pub fn te_lurker_rank(
    graph: &SnapshotGraph,
    table: &CumulativeScoreTable,
    cfg: &RankerConfig,
) -> Result<RankVector> {
    let weights = WeightSet::from_cumulative(graph, table, graph.spec().index, cfg)?;
    run_fixed_point(graph, &weights, cfg, Algorithm::TeLr)
}
