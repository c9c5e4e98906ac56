//! Seeded Monte Carlo experiments over random instances.
//!
//! Every instance is a uniformly random labeled tree with a uniformly random
//! root order, uniform(0,1) weights on every ordered node pair normalized to
//! the total flow, and hop budgets drawn uniformly from `0..=h_max`. Trials
//! are keyed by `(base_seed, n, trial)` only, so the same trees and flows
//! appear under every `h_max` and every algorithm.

use std::collections::BTreeMap;
use std::io::Write;
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::budget::EnergyBudget;
use crate::flow::FlowSet;
use crate::optimizer::{
    brute_force_oracle, optimize_bnb, optimize_greedy, Algorithm, BoundMode, OptimizeError,
    SearchResult,
};
use crate::tree::{assign_prefix_labels, random_tree_edges, LabeledTree, NodeId, TreeTopology};

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("instances need at least 3 nodes, got {0}")]
    TooFewNodes(usize),
    #[error("total flow must be positive and finite, got {0}")]
    BadTotalFlow(f64),
    #[error("at least one trial is required")]
    NoTrials,
    #[error("cannot consider {k} roots in a {n}-node network")]
    TooManyRoots { k: usize, n: usize },
    #[error("roots considered must be at least 1")]
    NoRoots,
    #[error(transparent)]
    Optimize(#[from] OptimizeError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InstanceSpec {
    pub n: usize,
    /// Mbps distributed over all ordered pairs.
    pub total_flow: f64,
    pub h_max: u32,
    pub seed: u64,
}

impl InstanceSpec {
    pub fn new(n: usize, h_max: u32, seed: u64) -> Self {
        InstanceSpec {
            n,
            total_flow: 1.0,
            h_max,
            seed,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.n < 3 {
            return Err(ExperimentError::TooFewNodes(self.n));
        }
        if !(self.total_flow.is_finite() && self.total_flow > 0.0) {
            return Err(ExperimentError::BadTotalFlow(self.total_flow));
        }
        Ok(())
    }
}

/// A generated instance. `tree` is rooted at `root_order[0]`.
#[derive(Clone, Debug)]
pub struct Instance {
    pub spec: InstanceSpec,
    pub edges: Vec<(NodeId, NodeId)>,
    pub root_order: Vec<NodeId>,
    pub tree: LabeledTree,
    pub flows: FlowSet,
    pub budgets: EnergyBudget,
}

impl Instance {
    pub fn root(&self) -> NodeId {
        self.root_order[0]
    }

    /// The same undirected tree rooted elsewhere, freshly labeled.
    pub fn rooted_at(&self, root: NodeId) -> LabeledTree {
        let nodes = (0..self.spec.n as u32).map(NodeId);
        let topo = TreeTopology::from_undirected(root, nodes, &self.edges)
            .expect("generated edges form a tree");
        assign_prefix_labels(&topo)
    }
}

/// Draws an instance; fully determined by `spec`.
///
/// Draw order: Prüfer sequence, root order, pair weights (ascending
/// `(src, dst)`), then one uniform per node mapped to a budget. Budgets are
/// `floor(u · (h_max + 1))`, so for a fixed seed every budget is
/// non-decreasing in `h_max`.
pub fn generate_instance(spec: InstanceSpec) -> Result<Instance, ExperimentError> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let edges = random_tree_edges(n, &mut rng).expect("n >= 3");
    let mut root_order: Vec<NodeId> = (0..n as u32).map(NodeId).collect();
    root_order.shuffle(&mut rng);

    let mut weights = Vec::with_capacity(n * (n - 1));
    for s in 0..n as u32 {
        for d in 0..n as u32 {
            if s != d {
                weights.push((NodeId(s), NodeId(d), rng.random::<f64>()));
            }
        }
    }
    let sum: f64 = weights.iter().map(|w| w.2).sum();
    let flows = FlowSet::new(
        weights
            .into_iter()
            .map(|(s, d, w)| (s, d, w / sum * spec.total_flow)),
    )
    .expect("weights are finite and non-negative");

    let budgets = EnergyBudget::new((0..n as u32).map(|v| {
        let u: f64 = rng.random();
        let h = ((u * (spec.h_max as f64 + 1.0)) as u32).min(spec.h_max);
        (NodeId(v), h)
    }));

    let tree = TreeTopology::from_undirected(root_order[0], root_order.iter().copied(), &edges)
        .expect("Prüfer edges form a tree");
    Ok(Instance {
        spec,
        edges,
        root_order,
        tree: assign_prefix_labels(&tree),
        flows,
        budgets,
    })
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    x = (x ^ (x >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    x ^ (x >> 31)
}

/// Seed of trial `trial` at network size `n`; independent of `h_max` and of
/// the algorithm so comparisons are paired.
pub fn trial_seed(base_seed: u64, n: usize, trial: usize) -> u64 {
    splitmix64(base_seed ^ splitmix64(((n as u64) << 32) | trial as u64))
}

/// One algorithm on one instance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialResult {
    pub n: usize,
    pub h_max: u32,
    pub seed: u64,
    pub algorithm: Algorithm,
    pub roots_considered: usize,
    pub traffic_initial: f64,
    pub traffic_final: f64,
    pub explored: u64,
    pub pruned: u64,
    /// Wall time, only when timing is enabled.
    pub ms: Option<f64>,
    /// Every evaluated plan kept each node within its budget and the root still.
    #[serde(skip)]
    pub within_budget: bool,
}

fn run_algorithm(
    algorithm: Algorithm,
    tree: &LabeledTree,
    flows: &FlowSet,
    budgets: &EnergyBudget,
    bound: BoundMode,
) -> Result<SearchResult, OptimizeError> {
    match algorithm {
        Algorithm::Greedy => optimize_greedy(tree, flows, budgets),
        Algorithm::Optimal => optimize_bnb(tree, flows, budgets, bound),
        Algorithm::Oracle => brute_force_oracle(tree, flows, budgets),
    }
}

fn timed<T>(timing: bool, f: impl FnOnce() -> T) -> (T, Option<f64>) {
    if timing {
        let start = Instant::now();
        let out = f();
        (out, Some(start.elapsed().as_secs_f64() * 1e3))
    } else {
        (f(), None)
    }
}

fn plan_ok(result: &SearchResult, budgets: &EnergyBudget) -> bool {
    let root = result.plan.initial().root();
    result.plan.within_budget(budgets) && result.plan.move_distance(root) == 0
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    pub sizes: Vec<usize>,
    pub h_max_values: Vec<u32>,
    pub trials: usize,
    pub algorithms: Vec<Algorithm>,
    pub base_seed: u64,
    pub total_flow: f64,
    /// Exhaustive algorithms are skipped above this size.
    pub optimal_max_n: usize,
    pub bound: BoundMode,
    pub timing: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            sizes: (3..=7).collect(),
            h_max_values: vec![1, 3, 10],
            trials: 50,
            algorithms: vec![Algorithm::Greedy, Algorithm::Optimal],
            base_seed: 0,
            total_flow: 1.0,
            optimal_max_n: 7,
            bound: BoundMode::Admissible,
            timing: false,
        }
    }
}

/// Traffic versus network size: `trials` paired instances per `(n, h_max)`.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<TrialResult>, ExperimentError> {
    if config.trials == 0 {
        return Err(ExperimentError::NoTrials);
    }
    let mut rows = Vec::new();
    for &n in &config.sizes {
        for &h_max in &config.h_max_values {
            for t in 0..config.trials {
                let seed = trial_seed(config.base_seed, n, t);
                let spec = InstanceSpec {
                    n,
                    total_flow: config.total_flow,
                    h_max,
                    seed,
                };
                let inst = generate_instance(spec)?;
                for &alg in &config.algorithms {
                    if alg != Algorithm::Greedy && n > config.optimal_max_n {
                        continue;
                    }
                    let (result, ms) = timed(config.timing, || {
                        run_algorithm(alg, &inst.tree, &inst.flows, &inst.budgets, config.bound)
                    });
                    let result = result?;
                    rows.push(TrialResult {
                        n,
                        h_max,
                        seed,
                        algorithm: alg,
                        roots_considered: 1,
                        traffic_initial: result.initial_traffic,
                        traffic_final: result.traffic,
                        explored: result.stats.nodes_explored,
                        pruned: result.stats.nodes_pruned,
                        ms,
                        within_budget: plan_ok(&result, &inst.budgets),
                    });
                }
            }
        }
    }
    Ok(rows)
}

#[derive(Clone, Debug)]
pub struct MultiRootConfig {
    pub n: usize,
    pub h_max_values: Vec<u32>,
    /// Values of k; the first k entries of each instance's root order are tried.
    pub roots: Vec<usize>,
    pub trials: usize,
    pub algorithms: Vec<Algorithm>,
    pub base_seed: u64,
    pub total_flow: f64,
    pub bound: BoundMode,
    pub timing: bool,
}

impl Default for MultiRootConfig {
    fn default() -> Self {
        MultiRootConfig {
            n: 5,
            h_max_values: vec![1, 3, 10],
            roots: (1..=5).collect(),
            trials: 50,
            algorithms: vec![Algorithm::Greedy, Algorithm::Optimal],
            base_seed: 0,
            total_flow: 1.0,
            bound: BoundMode::Admissible,
            timing: false,
        }
    }
}

/// Best traffic over the first k roots of each instance's random root order.
/// Root sets are nested in k, so per-instance minima never increase with k.
pub fn run_multi_root(config: &MultiRootConfig) -> Result<Vec<TrialResult>, ExperimentError> {
    if config.trials == 0 {
        return Err(ExperimentError::NoTrials);
    }
    for &k in &config.roots {
        if k == 0 {
            return Err(ExperimentError::NoRoots);
        }
        if k > config.n {
            return Err(ExperimentError::TooManyRoots { k, n: config.n });
        }
    }
    let k_max = config.roots.iter().copied().max().unwrap_or(0);
    let mut rows = Vec::new();
    for &h_max in &config.h_max_values {
        for t in 0..config.trials {
            let seed = trial_seed(config.base_seed, config.n, t);
            let spec = InstanceSpec {
                n: config.n,
                total_flow: config.total_flow,
                h_max,
                seed,
            };
            let inst = generate_instance(spec)?;
            for &alg in &config.algorithms {
                let mut per_root = Vec::with_capacity(k_max);
                for &root in &inst.root_order[..k_max] {
                    let tree = inst.rooted_at(root);
                    let (result, ms) = timed(config.timing, || {
                        run_algorithm(alg, &tree, &inst.flows, &inst.budgets, config.bound)
                    });
                    per_root.push((result?, ms));
                }
                for &k in &config.roots {
                    let considered = &per_root[..k];
                    let best = considered
                        .iter()
                        .map(|(r, _)| r.traffic)
                        .fold(f64::INFINITY, f64::min);
                    rows.push(TrialResult {
                        n: config.n,
                        h_max,
                        seed,
                        algorithm: alg,
                        roots_considered: k,
                        traffic_initial: considered[0].0.initial_traffic,
                        traffic_final: best,
                        explored: considered.iter().map(|(r, _)| r.stats.nodes_explored).sum(),
                        pruned: considered.iter().map(|(r, _)| r.stats.nodes_pruned).sum(),
                        ms: config
                            .timing
                            .then(|| considered.iter().filter_map(|(_, ms)| *ms).sum()),
                        within_budget: considered.iter().all(|(r, _)| plan_ok(r, &inst.budgets)),
                    });
                }
            }
        }
    }
    Ok(rows)
}

/// Per-cell means, one row per `(n, h_max, algorithm, roots_considered)` in
/// order of first appearance.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub n: usize,
    pub h_max: u32,
    pub algorithm: Algorithm,
    pub roots_considered: usize,
    pub trials: usize,
    pub mean_traffic_initial: f64,
    pub mean_traffic_final: f64,
    /// Standard error of `mean_traffic_final`.
    pub sem_traffic_final: f64,
    pub mean_explored: f64,
    pub mean_pruned: f64,
}

pub fn summarize(rows: &[TrialResult]) -> Vec<SummaryRow> {
    type Key = (usize, u32, Algorithm, usize);
    let mut order: Vec<Key> = Vec::new();
    let mut cells: BTreeMap<Key, Vec<&TrialResult>> = BTreeMap::new();
    for r in rows {
        let key = (r.n, r.h_max, r.algorithm, r.roots_considered);
        let cell = cells.entry(key).or_default();
        if cell.is_empty() {
            order.push(key);
        }
        cell.push(r);
    }
    order
        .into_iter()
        .map(|key| {
            let cell = &cells[&key];
            let count = cell.len() as f64;
            let mean =
                |f: &dyn Fn(&TrialResult) -> f64| cell.iter().map(|r| f(r)).sum::<f64>() / count;
            let mean_final = mean(&|r| r.traffic_final);
            let var = if cell.len() > 1 {
                cell.iter()
                    .map(|r| (r.traffic_final - mean_final).powi(2))
                    .sum::<f64>()
                    / (count - 1.0)
            } else {
                0.0
            };
            SummaryRow {
                n: key.0,
                h_max: key.1,
                algorithm: key.2,
                roots_considered: key.3,
                trials: cell.len(),
                mean_traffic_initial: mean(&|r| r.traffic_initial),
                mean_traffic_final: mean_final,
                sem_traffic_final: (var / count).sqrt(),
                mean_explored: mean(&|r| r.explored as f64),
                mean_pruned: mean(&|r| r.pruned as f64),
            }
        })
        .collect()
}

/// Writes `n,h_max,seed,algorithm,roots_considered,traffic_initial,traffic_final,explored,pruned,ms`.
pub fn write_trials_csv<W: Write>(rows: &[TrialResult], out: W) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_summary_csv<W: Write>(rows: &[SummaryRow], out: W) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

/// Σ_{i=1}^{n-1} i (n - i): greedy candidate evaluations when every node but
/// the root is an active mover.
pub fn greedy_worst_case(n: usize) -> u64 {
    (1..n as u64).map(|i| i * (n as u64 - i)).sum()
}

/// ((n - 1)!)²: complete placements when every node but the root is an
/// active mover that fits anywhere.
pub fn bnb_worst_case(n: usize) -> u128 {
    let f: u128 = (1..n as u128).product();
    f * f
}

/// Star rooted at node 0 where every other node is an active mover that can
/// reach any slot: flows run along the chain 1 → 2 → … → n-1 and back to 0.
pub fn worst_case_instance(n: usize) -> (LabeledTree, FlowSet, EnergyBudget) {
    let star = TreeTopology::new(NodeId(0), (1..n as u32).map(|v| (NodeId(0), NodeId(v))))
        .expect("a star is a tree");
    let mut flows: Vec<(NodeId, NodeId, f64)> = (1..n as u32 - 1)
        .map(|v| (NodeId(v), NodeId(v + 1), 1.0))
        .collect();
    flows.push((NodeId(n as u32 - 1), NodeId(0), 1.0));
    let total = flows.len() as f64;
    let flows = FlowSet::new(flows.into_iter().map(|(s, d, r)| (s, d, r / total)))
        .expect("valid chain flows");
    let budgets = EnergyBudget::uniform(&star, 2 * n as u32);
    (assign_prefix_labels(&star), flows, budgets)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexityRow {
    pub n: usize,
    pub greedy_evaluations: u64,
    pub greedy_formula: u64,
    pub bnb_explored: Option<u64>,
    pub bnb_leaves: Option<u64>,
    pub bnb_pruned: Option<u64>,
    /// Complete placements with pruning disabled.
    pub exhaustive_leaves: Option<u64>,
    pub bnb_ceiling: u128,
}

/// Operation counts on [`worst_case_instance`] for every `n` in `sizes`.
/// Branch-and-bound runs up to `bnb_max_n`, the unpruned enumeration up to
/// `exhaustive_max_n`.
pub fn complexity_probe(
    sizes: impl IntoIterator<Item = usize>,
    bnb_max_n: usize,
    exhaustive_max_n: usize,
) -> Result<Vec<ComplexityRow>, ExperimentError> {
    let mut out = Vec::new();
    for n in sizes {
        if n < 3 {
            return Err(ExperimentError::TooFewNodes(n));
        }
        let (tree, flows, budgets) = worst_case_instance(n);
        let greedy = optimize_greedy(&tree, &flows, &budgets)?;
        let bnb = if n <= bnb_max_n {
            Some(optimize_bnb(
                &tree,
                &flows,
                &budgets,
                BoundMode::Admissible,
            )?)
        } else {
            None
        };
        let exhaustive = if n <= exhaustive_max_n {
            Some(brute_force_oracle(&tree, &flows, &budgets)?)
        } else {
            None
        };
        out.push(ComplexityRow {
            n,
            greedy_evaluations: greedy.stats.nodes_explored,
            greedy_formula: greedy_worst_case(n),
            bnb_explored: bnb.as_ref().map(|r| r.stats.nodes_explored),
            bnb_leaves: bnb.as_ref().map(|r| r.stats.leaves),
            bnb_pruned: bnb.as_ref().map(|r| r.stats.nodes_pruned),
            exhaustive_leaves: exhaustive.as_ref().map(|r| r.stats.leaves),
            bnb_ceiling: bnb_worst_case(n),
        });
    }
    Ok(out)
}

pub fn write_complexity_csv<W: Write>(
    rows: &[ComplexityRow],
    out: W,
) -> Result<(), ExperimentError> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}
