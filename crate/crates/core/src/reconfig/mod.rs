//! Reconfiguration planning: which nodes move, where they anchor, and what
//! label they take on arrival.

mod simulate;

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::EnergyBudget;
use crate::label::PrefixLabel;
use crate::tree::{LabeledTree, NodeId, TopologyError, TreeTopology};

pub use simulate::{simulate, MovementTrace, SimulateError, Snapshot, Step};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error("initial and desired trees have different node sets")]
    NodeSetMismatch,
    #[error("initial root {initial} differs from desired root {desired}")]
    RootMismatch { initial: NodeId, desired: NodeId },
    #[error("no plan entry for node {0}")]
    MissingEntry(NodeId),
    #[error("plan entry for unknown node {0}")]
    UnknownNode(NodeId),
    #[error("plan entry for node {0} is inconsistent with its moving flag")]
    InconsistentEntry(NodeId),
    #[error("anchor label {label} of node {node} names no non-moving node")]
    BadAnchor { node: NodeId, label: PrefixLabel },
    #[error("the root {0} cannot move")]
    RootMoves(NodeId),
    #[error("plan labels do not form a tree: {0}")]
    InvalidDesired(#[from] TopologyError),
}

/// Per-node instruction issued by the root.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlanEntry {
    #[serde(rename = "id")]
    pub node: NodeId,
    pub moving: bool,
    pub anchor_label: Option<PrefixLabel>,
    pub desired_label: Option<PrefixLabel>,
    pub move_distance: Option<usize>,
}

impl PlanEntry {
    fn stay(node: NodeId) -> Self {
        PlanEntry {
            node,
            moving: false,
            anchor_label: None,
            desired_label: None,
            move_distance: None,
        }
    }
}

/// Label-assignment result for one (initial, desired) pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReconfigPlan {
    pub(crate) initial: LabeledTree,
    pub(crate) entries: BTreeMap<NodeId, PlanEntry>,
    pub(crate) desired: LabeledTree,
}

impl ReconfigPlan {
    /// Rebuilds a plan from exported entries, checking they describe a
    /// well-formed desired tree.
    pub fn from_entries(
        initial: LabeledTree,
        entries: impl IntoIterator<Item = PlanEntry>,
    ) -> Result<Self, PlanError> {
        let entries: BTreeMap<NodeId, PlanEntry> =
            entries.into_iter().map(|e| (e.node, e)).collect();
        for v in initial.topology().nodes() {
            if !entries.contains_key(&v) {
                return Err(PlanError::MissingEntry(v));
            }
        }
        let mut finals = BTreeMap::new();
        for (&v, e) in &entries {
            let current = initial.label(v).ok_or(PlanError::UnknownNode(v))?;
            if e.moving {
                if v == initial.root() {
                    return Err(PlanError::RootMoves(v));
                }
                let (Some(anchor), Some(desired), Some(_)) =
                    (&e.anchor_label, &e.desired_label, e.move_distance)
                else {
                    return Err(PlanError::InconsistentEntry(v));
                };
                let anchored = initial
                    .node_of(anchor)
                    .is_some_and(|a| entries.get(&a).is_some_and(|ae| !ae.moving));
                if !anchored {
                    return Err(PlanError::BadAnchor {
                        node: v,
                        label: anchor.clone(),
                    });
                }
                finals.insert(v, desired.clone());
            } else {
                if e.anchor_label.is_some()
                    || e.desired_label.is_some()
                    || e.move_distance.is_some()
                {
                    return Err(PlanError::InconsistentEntry(v));
                }
                finals.insert(v, current.clone());
            }
        }
        let desired = LabeledTree::from_labels(finals)?;
        Ok(ReconfigPlan {
            initial,
            entries,
            desired,
        })
    }

    pub fn initial(&self) -> &LabeledTree {
        &self.initial
    }

    /// Desired tree carrying final labels: initial labels for nodes that stay,
    /// desired labels for nodes that move.
    pub fn desired(&self) -> &LabeledTree {
        &self.desired
    }

    pub fn entries(&self) -> impl Iterator<Item = &PlanEntry> {
        self.entries.values()
    }

    pub fn entry(&self, v: NodeId) -> Option<&PlanEntry> {
        self.entries.get(&v)
    }

    pub fn moving_nodes(&self) -> BTreeSet<NodeId> {
        self.entries
            .values()
            .filter(|e| e.moving)
            .map(|e| e.node)
            .collect()
    }

    /// True when nothing has to move.
    pub fn is_identity(&self) -> bool {
        self.entries.values().all(|e| !e.moving)
    }

    /// Hops node `v` travels; 0 for nodes that stay.
    pub fn move_distance(&self, v: NodeId) -> usize {
        self.entries
            .get(&v)
            .and_then(|e| e.move_distance)
            .unwrap_or(0)
    }

    /// Whether every moving node fits in its budget and the root stays put.
    pub fn within_budget(&self, budgets: &EnergyBudget) -> bool {
        let root = self.initial.root();
        self.entries.values().all(|e| {
            if !e.moving {
                return true;
            }
            e.node != root && e.move_distance.unwrap_or(usize::MAX) <= budgets.get(e.node) as usize
        })
    }
}

/// Decides moving flags, anchors and desired labels for turning `initial` into
/// `desired`.
///
/// The desired tree is swept breadth first from the root. A child of a
/// non-moving node stays iff it already hangs off that node in the initial
/// tree; every other node moves. Movers under a non-moving parent anchor at
/// that parent; movers under a moving parent inherit its anchor.
pub fn plan_labels(
    initial: &LabeledTree,
    desired: &TreeTopology,
) -> Result<ReconfigPlan, PlanError> {
    let init_topo = initial.topology();
    if init_topo.root() != desired.root() {
        return Err(PlanError::RootMismatch {
            initial: init_topo.root(),
            desired: desired.root(),
        });
    }
    if !init_topo.nodes().eq(desired.nodes()) {
        return Err(PlanError::NodeSetMismatch);
    }

    let root = desired.root();
    let mut taken: HashSet<PrefixLabel> = initial.labels().values().cloned().collect();
    let mut finals: BTreeMap<NodeId, PrefixLabel> = BTreeMap::new();
    let mut anchor: BTreeMap<NodeId, NodeId> = BTreeMap::new();
    finals.insert(root, initial.label(root).expect("root is labeled").clone());

    for v in desired.bfs_order() {
        let v_moving = anchor.contains_key(&v);
        let v_label = finals[&v].clone();
        for &c in desired.children(v) {
            if !v_moving && init_topo.parent(c) == Some(v) {
                finals.insert(c, initial.label(c).expect("same node set").clone());
                continue;
            }
            anchor.insert(c, if v_moving { anchor[&v] } else { v });
            let label = unique_desired_label(&v_label, &mut taken);
            finals.insert(c, label);
        }
    }

    let desired_lt = LabeledTree::from_labels(finals)?;
    let mut entries = BTreeMap::new();
    for v in init_topo.nodes() {
        let entry = match anchor.get(&v) {
            None => PlanEntry::stay(v),
            Some(&a) => PlanEntry {
                node: v,
                moving: true,
                anchor_label: initial.label(a).cloned(),
                desired_label: desired_lt.label(v).cloned(),
                move_distance: Some(move_distance(initial, &desired_lt, v, a)?),
            },
        };
        entries.insert(v, entry);
    }
    Ok(ReconfigPlan {
        initial: initial.clone(),
        entries,
        desired: desired_lt,
    })
}

/// Smallest suffix `s ≥ 1` such that `parent ⊙ s` is not already in use by
/// any initial label or earlier assignment.
fn unique_desired_label(parent: &PrefixLabel, taken: &mut HashSet<PrefixLabel>) -> PrefixLabel {
    let mut suffix = 1;
    loop {
        let candidate = parent.child(suffix);
        if taken.insert(candidate.clone()) {
            return candidate;
        }
        suffix += 1;
    }
}

/// Hops a moving node `v` travels: up the initial tree until it is next to
/// its anchor, then down the desired tree to its new parent.
///
/// `d_initial(v, a) + d_desired(v, a) - 2`. A node with `v == anchor` has
/// nothing to do and gets 0.
pub fn move_distance(
    initial: &LabeledTree,
    desired: &LabeledTree,
    v: NodeId,
    anchor: NodeId,
) -> Result<usize, TopologyError> {
    let up = initial.distance(v, anchor)?;
    let down = desired.distance(v, anchor)?;
    Ok((up + down).saturating_sub(2))
}

/// Feasibility of reaching `desired` from `initial` under `budgets` with
/// prefix-routed moves around the fixed root.
pub fn feasible(initial: &LabeledTree, desired: &TreeTopology, budgets: &EnergyBudget) -> bool {
    match plan_labels(initial, desired) {
        Ok(plan) => plan.within_budget(budgets),
        Err(_) => false,
    }
}
