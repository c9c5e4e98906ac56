//! Traffic-minimizing topology reconfiguration for tree networks of mobile
//! robots.
//!
//! Nodes are addressed with prefix labels ([`label`], [`tree`]); aggregate
//! traffic is Σ rate × hop count over all flows ([`flow`]). The [`optimizer`]
//! picks a final tree under per-node hop budgets, [`reconfig`] turns an
//! (initial, final) pair into a move plan and replays it hop by hop without
//! ever disconnecting the network, and [`experiment`] runs seeded Monte Carlo
//! sweeps over random instances.

pub mod budget;
pub mod experiment;
pub mod flow;
pub mod io;
pub mod label;
pub mod optimizer;
pub mod reconfig;
pub mod tree;

pub use budget::EnergyBudget;
pub use flow::{aggregate_traffic, FlowSet};
pub use label::{common_prefix_length, PrefixLabel};
pub use optimizer::{
    attach_passive, brute_force_oracle, classify, lower_bound, optimize_bnb, optimize_greedy,
    Algorithm, BoundMode, Classification, SearchResult,
};
pub use reconfig::{feasible, move_distance, plan_labels, simulate, MovementTrace, ReconfigPlan};
pub use tree::{
    assign_prefix_labels, random_tree, trie_distance, LabeledTree, NodeId, TreeTopology,
};
