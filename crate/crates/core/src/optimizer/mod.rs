//! Final-topology selection around a fixed root.
//!
//! Nodes are first split into active movers, passive movers and a non-moving
//! skeleton ([`classify`]). Active movers are then placed one by one as new
//! leaves of the growing working graph, either exhaustively with
//! branch-and-bound ([`optimize_bnb`]) or greedily ([`optimize_greedy`]).
//! Passive movers are re-attached last ([`attach_passive`]); as leaves they
//! never carry traffic.

mod bnb;
mod greedy;
mod oracle;
mod passive;
mod work;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::{BudgetError, EnergyBudget};
use crate::flow::{aggregate_traffic, FlowError, FlowSet};
use crate::reconfig::{plan_labels, PlanError, ReconfigPlan};
use crate::tree::{LabeledTree, NodeId, TopologyError, TreeTopology};

pub use bnb::{lower_bound, optimize_bnb};
pub use greedy::optimize_greedy;
pub use oracle::{brute_force_oracle, ORACLE_MAX_ACTIVE};
pub use passive::attach_passive;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizeError {
    #[error(transparent)]
    Flow(#[from] FlowError),
    #[error(transparent)]
    Budget(#[from] BudgetError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("{0} active movers is too many for exhaustive search (limit {ORACLE_MAX_ACTIVE})")]
    ActiveSetTooLarge(usize),
}

/// Which lower bound branch-and-bound prunes with.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundMode {
    /// Every flow with an unplaced endpoint counted once at one hop. Never
    /// exceeds the best completion.
    #[default]
    Admissible,
    /// Sum of all in- and out-flows of every unplaced node. A flow between two
    /// unplaced nodes is counted twice, so this can prune the optimum.
    PaperLiteral,
}

impl FromStr for BoundMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "admissible" => Ok(BoundMode::Admissible),
            "paper-literal" => Ok(BoundMode::PaperLiteral),
            other => Err(format!("unknown bound mode {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Algorithm {
    Greedy,
    Optimal,
    Oracle,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Greedy => "greedy",
            Algorithm::Optimal => "optimal",
            Algorithm::Oracle => "oracle",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "greedy" => Ok(Algorithm::Greedy),
            "optimal" => Ok(Algorithm::Optimal),
            "oracle" => Ok(Algorithm::Oracle),
            other => Err(format!("unknown algorithm {other:?}")),
        }
    }
}

/// Node split produced before the search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Classification {
    pub active_moving: BTreeSet<NodeId>,
    pub passive_moving: BTreeSet<NodeId>,
    /// Non-moving nodes with the edges they share in the initial tree.
    pub skeleton: TreeTopology,
}

/// Splits nodes into active movers, passive movers and the skeleton.
///
/// A node is an active mover when it has traffic, a budget of at least one hop,
/// and every initial-tree descendant `d` can cover `h_d >= d_initial(v, d)`
/// hops so the subtree can evacuate ahead of it. Flow-free descendants of
/// active movers become passive movers. The root never moves.
pub fn classify(initial: &LabeledTree, flows: &FlowSet, budgets: &EnergyBudget) -> Classification {
    let topo = initial.topology();
    let root = topo.root();
    let mut active = BTreeSet::new();
    for v in topo.nodes() {
        if v == root || !flows.is_active(v) || budgets.effective(v, root) < 1 {
            continue;
        }
        let evacuates = topo.descendants(v).into_iter().all(|d| {
            let hops = initial.distance(v, d).expect("same tree");
            budgets.get(d) as usize >= hops
        });
        if evacuates {
            active.insert(v);
        }
    }
    let mut passive = BTreeSet::new();
    for &v in &active {
        for d in topo.descendants(v) {
            if !active.contains(&d) && !flows.is_active(d) {
                passive.insert(d);
            }
        }
    }
    let keep: BTreeSet<NodeId> = topo
        .nodes()
        .filter(|v| !active.contains(v) && !passive.contains(v))
        .collect();
    let skeleton = topo
        .induced(&keep)
        .expect("movers are closed under descendants");
    Classification {
        active_moving: active,
        passive_moving: passive,
        skeleton,
    }
}

/// Search effort counters.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct SearchStats {
    /// Attachments generated (branch-and-bound search nodes or greedy candidates).
    pub nodes_explored: u64,
    /// Partial solutions cut by the lower bound.
    pub nodes_pruned: u64,
    /// Complete placements evaluated.
    pub leaves: u64,
    /// Movers that had no feasible slot and went back under the skeleton.
    pub fallbacks: u64,
}

/// Outcome of one optimizer run.
#[derive(Clone, Debug)]
pub struct SearchResult {
    pub algorithm: Algorithm,
    /// Final tree with final labels.
    pub final_tree: LabeledTree,
    pub traffic: f64,
    pub initial_traffic: f64,
    pub plan: ReconfigPlan,
    pub classification: Classification,
    pub stats: SearchStats,
}

impl SearchResult {
    pub fn final_topology(&self) -> &TreeTopology {
        self.final_tree.topology()
    }
}

pub(crate) fn validate(
    initial: &LabeledTree,
    flows: &FlowSet,
    budgets: &EnergyBudget,
) -> Result<f64, OptimizeError> {
    budgets.validate(initial.topology())?;
    Ok(aggregate_traffic(initial, flows)?)
}

/// Passive re-attachment, planning and bookkeeping shared by all searches.
#[allow(clippy::too_many_arguments)]
pub(crate) fn finish(
    algorithm: Algorithm,
    initial: &LabeledTree,
    flows: &FlowSet,
    budgets: &EnergyBudget,
    classification: Classification,
    placed: Option<TreeTopology>,
    initial_traffic: f64,
    stats: SearchStats,
) -> Result<SearchResult, OptimizeError> {
    let final_topo = match placed {
        None => initial.topology().clone(),
        Some(working) => attach_passive(&working, &classification.passive_moving, initial, budgets),
    };
    let plan = plan_labels(initial, &final_topo)?;
    let final_tree = plan.desired().clone();
    let traffic = aggregate_traffic(&final_tree, flows)?;
    Ok(SearchResult {
        algorithm,
        final_tree,
        traffic,
        initial_traffic,
        plan,
        classification,
        stats,
    })
}
