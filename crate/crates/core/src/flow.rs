//! Directed traffic demands and the aggregate-traffic objective.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::tree::{LabeledTree, NodeId};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("flow from node {0} to itself")]
    SelfFlow(NodeId),
    #[error("flow {src} -> {dst} has invalid rate {rate}")]
    BadRate { src: NodeId, dst: NodeId, rate: f64 },
    #[error("flow {0} -> {1} listed twice")]
    Duplicate(NodeId, NodeId),
    #[error("flow endpoint {0} is not in the topology")]
    UnknownEndpoint(NodeId),
}

/// Directed flows `f(u, v)` in Mbps. Pairs that are absent carry rate 0.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct FlowSet {
    rates: BTreeMap<(NodeId, NodeId), f64>,
}

impl FlowSet {
    pub fn new(flows: impl IntoIterator<Item = (NodeId, NodeId, f64)>) -> Result<Self, FlowError> {
        let mut rates = BTreeMap::new();
        for (src, dst, rate) in flows {
            if src == dst {
                return Err(FlowError::SelfFlow(src));
            }
            if !rate.is_finite() || rate < 0.0 {
                return Err(FlowError::BadRate { src, dst, rate });
            }
            if rates.insert((src, dst), rate).is_some() {
                return Err(FlowError::Duplicate(src, dst));
            }
        }
        Ok(FlowSet { rates })
    }

    pub fn empty() -> Self {
        FlowSet::default()
    }

    pub fn rate(&self, src: NodeId, dst: NodeId) -> f64 {
        self.rates.get(&(src, dst)).copied().unwrap_or(0.0)
    }

    /// `(src, dst, rate)` ordered by `(src, dst)`.
    pub fn iter(&self) -> impl Iterator<Item = (NodeId, NodeId, f64)> + '_ {
        self.rates.iter().map(|(&(s, d), &r)| (s, d, r))
    }

    pub fn total(&self) -> f64 {
        self.rates.values().sum()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    /// A node is active when it sends or receives a nonzero flow.
    pub fn is_active(&self, v: NodeId) -> bool {
        self.rates
            .iter()
            .any(|(&(s, d), &r)| r > 0.0 && (s == v || d == v))
    }

    pub fn endpoints(&self) -> BTreeSet<NodeId> {
        self.rates.keys().flat_map(|&(s, d)| [s, d]).collect()
    }

    /// Every rate multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        FlowSet {
            rates: self.rates.iter().map(|(&k, &r)| (k, r * factor)).collect(),
        }
    }
}

/// Σ f(u,v) · d(u,v) over all ordered pairs, in Mbps·hops.
pub fn aggregate_traffic(tree: &LabeledTree, flows: &FlowSet) -> Result<f64, FlowError> {
    let mut total = 0.0;
    for (src, dst, rate) in flows.iter() {
        let ls = tree.label(src).ok_or(FlowError::UnknownEndpoint(src))?;
        let ld = tree.label(dst).ok_or(FlowError::UnknownEndpoint(dst))?;
        total += rate * ls.distance(ld) as f64;
    }
    Ok(total)
}
