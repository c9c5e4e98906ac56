//! JSON file formats.
//!
//! ```text
//! topology  {"root": 0, "edges": [[0, 1], [1, 2]]}          parent, child
//! flows     {"flows": [{"src": 1, "dst": 2, "mbps": 0.5}]}
//! budgets   {"budgets": [{"node": 1, "hops": 3}]}
//! plan      {"root": 0, "entries": [{"id": 2, "moving": true, "anchor_label": "0.1",
//!            "desired_label": "0.1.1", "move_distance": 1}, ...]}
//! ```
//!
//! Malformed JSON is an [`IoError::Syntax`] with a line and column; JSON that
//! parses but describes something impossible (a cycle, a negative budget, a
//! flow to an unknown node) is an [`IoError::Invalid`].

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::budget::EnergyBudget;
use crate::flow::FlowSet;
use crate::label::PrefixLabel;
use crate::optimizer::{Algorithm, SearchResult};
use crate::reconfig::{MovementTrace, PlanEntry, ReconfigPlan};
use crate::tree::{LabeledTree, NodeId, TreeTopology};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("{0}")]
    Invalid(String),
}

impl IoError {
    fn invalid(e: impl std::fmt::Display) -> Self {
        IoError::Invalid(e.to_string())
    }
}

impl From<serde_json::Error> for IoError {
    fn from(e: serde_json::Error) -> Self {
        let mut message = e.to_string();
        // serde_json appends the position; it is kept in its own fields here.
        if let Some(at) = message.rfind(" at line ") {
            message.truncate(at);
        }
        IoError::Syntax {
            line: e.line(),
            column: e.column(),
            message,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TopologyFile {
    pub root: NodeId,
    pub edges: Vec<(NodeId, NodeId)>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowRecord {
    pub src: NodeId,
    pub dst: NodeId,
    pub mbps: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowFile {
    pub flows: Vec<FlowRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetRecord {
    pub node: NodeId,
    /// Signed so that negative budgets parse and are rejected as invalid.
    pub hops: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BudgetFile {
    pub budgets: Vec<BudgetRecord>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlanFile {
    pub root: NodeId,
    pub entries: Vec<PlanEntry>,
}

pub fn parse_topology(text: &str) -> Result<TreeTopology, IoError> {
    let file: TopologyFile = serde_json::from_str(text)?;
    TreeTopology::new(file.root, file.edges).map_err(IoError::invalid)
}

pub fn topology_to_json(topo: &TreeTopology) -> String {
    let file = TopologyFile {
        root: topo.root(),
        edges: topo.edges().collect(),
    };
    serde_json::to_string_pretty(&file).expect("plain data serializes")
}

/// Parses flows; with a topology, every endpoint must be one of its nodes.
pub fn parse_flows(text: &str, topology: Option<&TreeTopology>) -> Result<FlowSet, IoError> {
    let file: FlowFile = serde_json::from_str(text)?;
    if let Some(topo) = topology {
        for r in &file.flows {
            for v in [r.src, r.dst] {
                if !topo.contains(v) {
                    return Err(IoError::Invalid(format!(
                        "flow endpoint {v} is not in the topology"
                    )));
                }
            }
        }
    }
    FlowSet::new(file.flows.into_iter().map(|r| (r.src, r.dst, r.mbps))).map_err(IoError::invalid)
}

pub fn flows_to_json(flows: &FlowSet) -> String {
    let file = FlowFile {
        flows: flows
            .iter()
            .map(|(src, dst, mbps)| FlowRecord { src, dst, mbps })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("plain data serializes")
}

/// Parses budgets for every node of `topology`.
pub fn parse_budgets(text: &str, topology: &TreeTopology) -> Result<EnergyBudget, IoError> {
    let file: BudgetFile = serde_json::from_str(text)?;
    let mut hops = Vec::with_capacity(file.budgets.len());
    for r in &file.budgets {
        let h = u32::try_from(r.hops).map_err(|_| {
            IoError::Invalid(format!(
                "budget {} of node {} is out of range",
                r.hops, r.node
            ))
        })?;
        if hops.iter().any(|&(v, _)| v == r.node) {
            return Err(IoError::Invalid(format!(
                "budget for node {} listed twice",
                r.node
            )));
        }
        hops.push((r.node, h));
    }
    let budgets = EnergyBudget::new(hops);
    budgets.validate(topology).map_err(IoError::invalid)?;
    Ok(budgets)
}

pub fn budgets_to_json(budgets: &EnergyBudget) -> String {
    let file = BudgetFile {
        budgets: budgets
            .iter()
            .map(|(node, h)| BudgetRecord {
                node,
                hops: h.into(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("plain data serializes")
}

/// Parses a plan against the initial tree it was computed for.
pub fn parse_plan(text: &str, initial: &LabeledTree) -> Result<ReconfigPlan, IoError> {
    let file: PlanFile = serde_json::from_str(text)?;
    if file.root != initial.root() {
        return Err(IoError::Invalid(format!(
            "plan root {} differs from topology root {}",
            file.root,
            initial.root()
        )));
    }
    ReconfigPlan::from_entries(initial.clone(), file.entries).map_err(IoError::invalid)
}

pub fn plan_to_json(plan: &ReconfigPlan) -> String {
    let file = PlanFile {
        root: plan.initial().root(),
        entries: plan.entries().cloned().collect(),
    };
    serde_json::to_string_pretty(&file).expect("plain data serializes")
}

pub fn parse_label(text: &str) -> Result<PrefixLabel, IoError> {
    text.trim().parse().map_err(IoError::invalid)
}

#[derive(Serialize)]
struct LabelRecord<'a> {
    id: NodeId,
    label: &'a PrefixLabel,
}

#[derive(Serialize)]
struct TraceFile<'a> {
    steps: &'a [crate::reconfig::Step],
    final_labels: Vec<LabelRecord<'a>>,
}

pub fn trace_to_json(trace: &MovementTrace) -> String {
    let file = TraceFile {
        steps: &trace.steps,
        final_labels: trace
            .final_tree
            .labels()
            .iter()
            .map(|(&id, label)| LabelRecord { id, label })
            .collect(),
    };
    serde_json::to_string_pretty(&file).expect("plain data serializes")
}

/// One-line outcome of an optimization run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SummaryRecord {
    pub algorithm: Algorithm,
    pub traffic_initial: f64,
    pub traffic_final: f64,
    pub nodes_explored: u64,
    pub nodes_pruned: u64,
    pub wall_time_ms: f64,
}

impl SummaryRecord {
    pub fn new(result: &SearchResult, wall_time_ms: f64) -> Self {
        SummaryRecord {
            algorithm: result.algorithm,
            traffic_initial: result.initial_traffic,
            traffic_final: result.traffic,
            nodes_explored: result.stats.nodes_explored,
            nodes_pruned: result.stats.nodes_pruned,
            wall_time_ms,
        }
    }
}
