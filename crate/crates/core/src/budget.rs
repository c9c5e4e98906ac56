use std::collections::BTreeMap;

use thiserror::Error;

use crate::tree::{NodeId, TreeTopology};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BudgetError {
    #[error("no hop budget for node {0}")]
    Missing(NodeId),
    #[error("hop budget given for unknown node {0}")]
    UnknownNode(NodeId),
}

/// Per-node movement allowance `h_v`, in hops.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EnergyBudget {
    hops: BTreeMap<NodeId, u32>,
}

impl EnergyBudget {
    pub fn new(hops: impl IntoIterator<Item = (NodeId, u32)>) -> Self {
        EnergyBudget {
            hops: hops.into_iter().collect(),
        }
    }

    /// Every node of `tree` gets the same allowance.
    pub fn uniform(tree: &TreeTopology, hops: u32) -> Self {
        EnergyBudget {
            hops: tree.nodes().map(|v| (v, hops)).collect(),
        }
    }

    /// Checks that the budget covers exactly the nodes of `tree`.
    pub fn validate(&self, tree: &TreeTopology) -> Result<(), BudgetError> {
        if let Some(v) = tree.nodes().find(|v| !self.hops.contains_key(v)) {
            return Err(BudgetError::Missing(v));
        }
        if let Some(&v) = self.hops.keys().find(|v| !tree.contains(**v)) {
            return Err(BudgetError::UnknownNode(v));
        }
        Ok(())
    }

    /// Raw allowance; nodes without an entry get 0.
    pub fn get(&self, v: NodeId) -> u32 {
        self.hops.get(&v).copied().unwrap_or(0)
    }

    /// Allowance the optimizer may use: the root never moves.
    pub fn effective(&self, v: NodeId, root: NodeId) -> u32 {
        if v == root {
            0
        } else {
            self.get(v)
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = (NodeId, u32)> + '_ {
        self.hops.iter().map(|(&v, &h)| (v, h))
    }

    /// Every allowance raised by `extra`.
    pub fn raised(&self, extra: u32) -> Self {
        EnergyBudget {
            hops: self
                .hops
                .iter()
                .map(|(&v, &h)| (v, h.saturating_add(extra)))
                .collect(),
        }
    }
}
