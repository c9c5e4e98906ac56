//! Exhaustive reference search.
//!
//! Walks the same placement space as branch-and-bound without pruning, but
//! rebuilds and relabels every complete tree from scratch and prices it with
//! [`aggregate_traffic`], so it shares no distance or bound bookkeeping with
//! the fast search.

use std::collections::BTreeSet;

use super::{classify, finish, Algorithm, OptimizeError, SearchResult, SearchStats};
use crate::budget::EnergyBudget;
use crate::flow::{aggregate_traffic, FlowSet};
use crate::tree::{assign_prefix_labels, LabeledTree, NodeId, TreeTopology};

/// Largest active set the oracle accepts.
pub const ORACLE_MAX_ACTIVE: usize = 6;

struct Enumeration<'a> {
    initial: &'a LabeledTree,
    flows: FlowSet,
    budgets: &'a EnergyBudget,
    skeleton_edges: Vec<(NodeId, NodeId)>,
    best_traffic: f64,
    best: Option<TreeTopology>,
    stats: SearchStats,
}

impl Enumeration<'_> {
    fn tree(&self, placements: &[(NodeId, NodeId)]) -> TreeTopology {
        TreeTopology::new(
            self.initial.root(),
            self.skeleton_edges.iter().chain(placements).copied(),
        )
        .expect("leaf attachments keep a tree")
    }

    fn permutations(&mut self, prefix: &mut Vec<NodeId>, rest: &BTreeSet<NodeId>) {
        if rest.is_empty() {
            let order = prefix.clone();
            self.place(&order, &mut Vec::new());
            return;
        }
        for &v in rest {
            let mut smaller = rest.clone();
            smaller.remove(&v);
            prefix.push(v);
            self.permutations(prefix, &smaller);
            prefix.pop();
        }
    }

    fn place(&mut self, order: &[NodeId], placements: &mut Vec<(NodeId, NodeId)>) {
        let k = placements.len();
        if k == order.len() {
            self.evaluate(placements);
            return;
        }
        let partial = self.tree(placements);
        for u in partial.bfs_order() {
            self.stats.nodes_explored += 1;
            placements.push((u, order[k]));
            self.place(order, placements);
            placements.pop();
        }
    }

    fn evaluate(&mut self, placements: &[(NodeId, NodeId)]) {
        self.stats.leaves += 1;
        let tree = self.tree(placements);
        let labeled = assign_prefix_labels(&tree);
        let init = self.initial.topology();
        let root = self.initial.root();
        // A node stays put iff it and all its ancestors kept their initial parent.
        let mut fixed = BTreeSet::from([root]);
        for v in tree.bfs_order() {
            if let Some(p) = tree.parent(v) {
                if fixed.contains(&p) && init.parent(v) == Some(p) {
                    fixed.insert(v);
                }
            }
        }
        for &(_, x) in placements {
            if fixed.contains(&x) {
                continue;
            }
            let mut anchor = tree.parent(x).expect("placed nodes have a parent");
            while !fixed.contains(&anchor) {
                anchor = tree.parent(anchor).expect("the root is fixed");
            }
            let up = self.initial.distance(x, anchor).expect("known node");
            let down = labeled.distance(x, anchor).expect("known node");
            if (up + down).saturating_sub(2) > self.budgets.effective(x, root) as usize {
                return;
            }
        }
        let traffic = aggregate_traffic(&labeled, &self.flows).expect("flows restricted to tree");
        if traffic < self.best_traffic {
            self.best_traffic = traffic;
            self.best = Some(tree);
        }
    }
}

/// True minimum over every permutation and attachment sequence of the active
/// movers. Test-scale only: refuses more than [`ORACLE_MAX_ACTIVE`] movers.
pub fn brute_force_oracle(
    initial: &LabeledTree,
    flows: &FlowSet,
    budgets: &EnergyBudget,
) -> Result<SearchResult, OptimizeError> {
    budgets.validate(initial.topology())?;
    let initial_traffic = aggregate_traffic(initial, flows)?;
    let classes = classify(initial, flows, budgets);
    if classes.active_moving.len() > ORACLE_MAX_ACTIVE {
        return Err(OptimizeError::ActiveSetTooLarge(
            classes.active_moving.len(),
        ));
    }
    if classes.active_moving.is_empty() {
        return finish(
            Algorithm::Oracle,
            initial,
            flows,
            budgets,
            classes,
            None,
            initial_traffic,
            SearchStats::default(),
        );
    }
    // Passive movers are absent until the end; their flows are all zero.
    let in_tree = |v: NodeId| !classes.passive_moving.contains(&v);
    let flows_in_tree = FlowSet::new(flows.iter().filter(|&(s, d, _)| in_tree(s) && in_tree(d)))
        .expect("subset of valid flows");
    let mut run = Enumeration {
        initial,
        flows: flows_in_tree,
        budgets,
        skeleton_edges: classes.skeleton.edges().collect(),
        best_traffic: initial_traffic,
        best: None,
        stats: SearchStats::default(),
    };
    run.permutations(&mut Vec::new(), &classes.active_moving);
    let Enumeration { best, stats, .. } = run;
    finish(
        Algorithm::Oracle,
        initial,
        flows,
        budgets,
        classes,
        best,
        initial_traffic,
        stats,
    )
}
