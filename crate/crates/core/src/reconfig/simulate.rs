//! Step-by-step execution of a reconfiguration plan.
//!
//! Moves are serialized one hop at a time. A hop re-attaches a leaf node from
//! its current neighbor to a node adjacent to that neighbor, chosen by
//! longest-prefix routing on the labels currently in the network. Execution
//! runs in two phases:
//!
//! 1. every mover climbs, deepest first, until it hangs off a non-moving
//!    node, which turns each mover into a leaf before it has to leave;
//! 2. movers in order of desired depth route to their anchor and are then
//!    forwarded down to their desired parent, where they take the desired
//!    label.
//!
//! Each mover ends up spending exactly its planned move distance.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};

use serde::Serialize;
use thiserror::Error;

use super::ReconfigPlan;
use crate::label::PrefixLabel;
use crate::tree::{LabeledTree, NodeId, TopologyError};

/// Link set of the network after a step, as `(attached_to, node)` pairs.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Snapshot {
    pub edges: Vec<(NodeId, NodeId)>,
}

impl Snapshot {
    /// Undirected reachability of every node in `nodes` from `root`.
    pub fn is_connected(&self, root: NodeId, nodes: &BTreeSet<NodeId>) -> bool {
        let mut adj: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
        for &(a, b) in &self.edges {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        let mut seen = BTreeSet::from([root]);
        let mut queue = VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            for &v in adj.get(&u).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(v) {
                    queue.push_back(v);
                }
            }
        }
        nodes.iter().all(|v| seen.contains(v))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub node: NodeId,
    pub from: NodeId,
    pub to: NodeId,
    /// Label taken on this step, if the node reached its desired parent.
    pub relabeled: Option<PrefixLabel>,
    pub connected: bool,
    pub snapshot: Snapshot,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MovementTrace {
    pub steps: Vec<Step>,
    pub final_tree: LabeledTree,
}

impl MovementTrace {
    /// Number of hops node `v` made.
    pub fn steps_of(&self, v: NodeId) -> usize {
        self.steps.iter().filter(|s| s.node == v).count()
    }

    pub fn all_connected(&self) -> bool {
        self.steps.iter().all(|s| s.connected)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SimulateError {
    /// A step cut some node off from the root. Carries the steps up to and
    /// including the offending one.
    #[error("moving node {node} at step {step} disconnects the network")]
    Disconnected {
        step: usize,
        node: NodeId,
        steps: Vec<Step>,
    },
    #[error("node {node} cannot route from {at} toward {target}")]
    Unroutable {
        node: NodeId,
        at: NodeId,
        target: PrefixLabel,
    },
    #[error("execution ended in a tree different from the plan's desired tree")]
    FinalMismatch,
    #[error("final labels do not form a tree: {0}")]
    BrokenFinal(#[from] TopologyError),
}

struct Mover {
    anchor: NodeId,
    anchor_label: PrefixLabel,
    desired_label: PrefixLabel,
    parent_label: PrefixLabel,
}

struct Network<'a> {
    root: NodeId,
    nodes: BTreeSet<NodeId>,
    attach: BTreeMap<NodeId, NodeId>,
    labels: BTreeMap<NodeId, PrefixLabel>,
    by_label: HashMap<PrefixLabel, NodeId>,
    settled: BTreeSet<NodeId>,
    movers: &'a BTreeMap<NodeId, Mover>,
    steps: Vec<Step>,
}

impl Network<'_> {
    fn next_hop(
        &self,
        node: NodeId,
        at: NodeId,
        target: &PrefixLabel,
    ) -> Result<NodeId, SimulateError> {
        let unroutable = || SimulateError::Unroutable {
            node,
            at,
            target: target.clone(),
        };
        let here = &self.labels[&at];
        if here == target {
            return Err(unroutable());
        }
        if here.is_prefix_of(target) {
            let next = target.truncated(here.len() + 1).expect("target is longer");
            let y = self.by_label.get(&next).copied().ok_or_else(unroutable)?;
            if self.attach.get(&y) == Some(&at) {
                return Ok(y);
            }
            return Err(unroutable());
        }
        self.attach.get(&at).copied().ok_or_else(unroutable)
    }

    fn try_settle(&mut self, v: NodeId) -> Option<PrefixLabel> {
        let m = &self.movers[&v];
        let at = self.attach.get(&v)?;
        if self.settled.contains(&v)
            || !self.settled.contains(at)
            || self.labels[at] != m.parent_label
        {
            return None;
        }
        let old = self
            .labels
            .insert(v, m.desired_label.clone())
            .expect("labeled");
        self.by_label.remove(&old);
        self.by_label.insert(m.desired_label.clone(), v);
        self.settled.insert(v);
        Some(m.desired_label.clone())
    }

    fn step(&mut self, v: NodeId, to: NodeId) -> Result<(), SimulateError> {
        let from = self.attach[&v];
        let adjacent = self.attach.get(&to) == Some(&from) || self.attach.get(&from) == Some(&to);
        if !adjacent || to == v {
            return Err(SimulateError::Unroutable {
                node: v,
                at: from,
                target: self.labels[&to].clone(),
            });
        }
        // Anything still hanging off `v` loses its link when `v` leaves.
        let orphans: Vec<NodeId> = self
            .attach
            .iter()
            .filter(|(_, &p)| p == v)
            .map(|(&c, _)| c)
            .collect();
        for o in orphans {
            self.attach.remove(&o);
        }
        self.attach.insert(v, to);
        let relabeled = self.try_settle(v);
        let snapshot = Snapshot {
            edges: self.attach.iter().map(|(&c, &p)| (p, c)).collect(),
        };
        let connected = snapshot.is_connected(self.root, &self.nodes);
        self.steps.push(Step {
            node: v,
            from,
            to,
            relabeled,
            connected,
            snapshot,
        });
        if !connected {
            return Err(SimulateError::Disconnected {
                step: self.steps.len() - 1,
                node: v,
                steps: self.steps.clone(),
            });
        }
        Ok(())
    }

    fn route(
        &mut self,
        v: NodeId,
        target: &PrefixLabel,
        done: impl Fn(&Self) -> bool,
    ) -> Result<(), SimulateError> {
        // Any simple route in a tree is shorter than twice its node count.
        let mut budget = 2 * self.nodes.len() + 2;
        while !done(self) {
            if budget == 0 {
                return Err(SimulateError::Unroutable {
                    node: v,
                    at: self.attach[&v],
                    target: target.clone(),
                });
            }
            budget -= 1;
            let hop = self.next_hop(v, self.attach[&v], target)?;
            self.step(v, hop)?;
        }
        Ok(())
    }
}

/// Executes `plan` one hop at a time, auditing connectivity after every hop.
pub fn simulate(plan: &ReconfigPlan) -> Result<MovementTrace, SimulateError> {
    let initial = &plan.initial;
    let topo = initial.topology();

    let mut movers = BTreeMap::new();
    for e in plan.entries.values().filter(|e| e.moving) {
        let (Some(anchor_label), Some(desired_label)) = (&e.anchor_label, &e.desired_label) else {
            continue;
        };
        let Some(anchor) = initial.node_of(anchor_label) else {
            return Err(SimulateError::Unroutable {
                node: e.node,
                at: e.node,
                target: anchor_label.clone(),
            });
        };
        let Some(parent_label) = desired_label.parent() else {
            return Err(SimulateError::Unroutable {
                node: e.node,
                at: e.node,
                target: desired_label.clone(),
            });
        };
        movers.insert(
            e.node,
            Mover {
                anchor,
                anchor_label: anchor_label.clone(),
                desired_label: desired_label.clone(),
                parent_label,
            },
        );
    }

    let mut net = Network {
        root: topo.root(),
        nodes: topo.nodes().collect(),
        attach: topo.parents().clone(),
        labels: initial.labels().clone(),
        by_label: initial
            .labels()
            .iter()
            .map(|(&v, l)| (l.clone(), v))
            .collect(),
        settled: topo.nodes().filter(|v| !movers.contains_key(v)).collect(),
        movers: &movers,
        steps: Vec::new(),
    };

    // Phase 1: deepest movers first, climb until hanging off a non-moving node.
    let mut by_depth: Vec<NodeId> = movers.keys().copied().collect();
    by_depth.sort_by_key(|&v| (std::cmp::Reverse(topo.depth(v)), v));
    for &v in &by_depth {
        let target = movers[&v].anchor_label.clone();
        net.route(v, &target, |n| {
            n.settled.contains(&v) || n.attach.get(&v).is_some_and(|a| !n.movers.contains_key(a))
        })?;
    }

    // Phase 2: shallowest desired position first, via the anchor.
    let mut by_desired: Vec<NodeId> = movers.keys().copied().collect();
    by_desired.sort_by_key(|v| (movers[v].desired_label.len(), *v));
    for &v in &by_desired {
        net.try_settle(v);
        let m = &movers[&v];
        let anchor = m.anchor;
        net.route(v, &m.anchor_label, |n| {
            n.settled.contains(&v) || n.attach.get(&v) == Some(&anchor)
        })?;
        net.route(v, &m.parent_label, |n| n.settled.contains(&v))?;
    }

    let final_tree = LabeledTree::from_labels(net.labels.clone())?;
    if final_tree.topology().parents() != &net.attach || final_tree != plan.desired {
        return Err(SimulateError::FinalMismatch);
    }
    Ok(MovementTrace {
        steps: net.steps,
        final_tree,
    })
}
