use super::work::{Problem, WorkingGraph};
use super::{
    classify, finish, validate, Algorithm, BoundMode, OptimizeError, SearchResult, SearchStats,
};
use std::collections::BTreeSet;

use crate::budget::EnergyBudget;
use crate::flow::FlowSet;
use crate::tree::{assign_prefix_labels, LabeledTree, NodeId, TreeTopology};

/// Rearranges `items` into the next lexicographic permutation; false once the
/// last one has been passed (and `items` is back in ascending order).
pub(crate) fn next_permutation(items: &mut [usize]) -> bool {
    if items.len() < 2 {
        return false;
    }
    let Some(i) = (0..items.len() - 1)
        .rev()
        .find(|&i| items[i] < items[i + 1])
    else {
        items.reverse();
        return false;
    };
    let j = (i + 1..items.len())
        .rev()
        .find(|&j| items[j] > items[i])
        .expect("pivot has a successor");
    items.swap(i, j);
    items[i + 1..].reverse();
    true
}

/// Traffic already fixed by `partial` plus an estimate for flows touching
/// `unplaced` nodes, each of which will sit at least one hop from anything.
///
/// Flows with an endpoint in neither set are ignored.
pub fn lower_bound(
    partial: &TreeTopology,
    flows: &FlowSet,
    unplaced: &BTreeSet<NodeId>,
    mode: BoundMode,
) -> f64 {
    let labeled = assign_prefix_labels(partial);
    let mut total = 0.0;
    for (s, d, r) in flows.iter() {
        let pending = unplaced.contains(&s) as u8 + unplaced.contains(&d) as u8;
        if pending == 0 {
            if let (Some(ls), Some(ld)) = (labeled.label(s), labeled.label(d)) {
                total += r * ls.distance(ld) as f64;
            }
            continue;
        }
        total += match mode {
            BoundMode::Admissible => r,
            BoundMode::PaperLiteral => r * pending as f64,
        };
    }
    total
}

struct Search<'a> {
    problem: &'a Problem,
    graph: WorkingGraph,
    perm: Vec<usize>,
    /// Lower-bound contribution of the movers `perm[k..]`, indexed by `k`.
    remaining: Vec<f64>,
    best_traffic: f64,
    best: Option<TreeTopology>,
    stats: SearchStats,
}

impl Search<'_> {
    fn bound_remaining(&mut self, mode: BoundMode) {
        let p = self.problem;
        let len = self.perm.len();
        let mut unplaced = vec![false; p.len()];
        self.remaining = vec![0.0; len + 1];
        for k in (0..len).rev() {
            unplaced[self.perm[k]] = true;
            self.remaining[k] = match mode {
                BoundMode::Admissible => p
                    .flows
                    .iter()
                    .filter(|&&(s, d, _)| unplaced[s] || unplaced[d])
                    .map(|&(_, _, r)| r)
                    .sum(),
                BoundMode::PaperLiteral => p
                    .flows
                    .iter()
                    .map(|&(s, d, r)| r * (unplaced[s] as u8 + unplaced[d] as u8) as f64)
                    .sum(),
            };
        }
    }

    fn descend(&mut self, k: usize) {
        let p = self.problem;
        let x = self.perm[k];
        let last = k + 1 == self.perm.len();
        for u in self.graph.positions(p.root) {
            self.stats.nodes_explored += 1;
            if self.graph.move_cost(p, x, u) > p.budget[x] {
                continue;
            }
            self.graph.attach(p, x, u);
            let traffic = self.graph.traffic(p);
            if last {
                self.stats.leaves += 1;
                if traffic < self.best_traffic {
                    self.best_traffic = traffic;
                    self.best = Some(self.graph.to_topology(p));
                }
            } else {
                let bound = traffic + self.remaining[k + 1];
                // Slack keeps rounding in the bound from cutting exact ties.
                let slack = 1e-12 * self.best_traffic.abs().max(1.0);
                if bound >= self.best_traffic + slack {
                    self.stats.nodes_pruned += 1;
                } else {
                    self.descend(k + 1);
                }
            }
            self.graph.detach_last();
        }
    }
}

/// Exact minimum-traffic placement of the active movers by depth-first
/// branch-and-bound.
///
/// Permutations of the active movers are tried in lexicographic order. Within
/// one permutation each mover is hung in turn from every node of the working
/// graph (breadth-first order), subject to its hop budget. A partial placement
/// is dropped once its traffic plus the `bound` estimate for the unplaced
/// movers reaches the incumbent, which starts at the initial tree's traffic
/// and is replaced only on strict improvement.
pub fn optimize_bnb(
    initial: &LabeledTree,
    flows: &FlowSet,
    budgets: &EnergyBudget,
    bound: BoundMode,
) -> Result<SearchResult, OptimizeError> {
    let initial_traffic = validate(initial, flows, budgets)?;
    let classes = classify(initial, flows, budgets);
    if classes.active_moving.is_empty() {
        return finish(
            Algorithm::Optimal,
            initial,
            flows,
            budgets,
            classes,
            None,
            initial_traffic,
            SearchStats::default(),
        );
    }
    let problem = Problem::new(initial, flows, budgets, &classes);
    let mut search = Search {
        problem: &problem,
        graph: WorkingGraph::from_skeleton(&problem, &classes.skeleton),
        perm: problem.active.clone(),
        remaining: Vec::new(),
        best_traffic: initial_traffic,
        best: None,
        stats: SearchStats::default(),
    };
    loop {
        search.bound_remaining(bound);
        search.descend(0);
        if !next_permutation(&mut search.perm) {
            break;
        }
    }
    let Search { best, stats, .. } = search;
    finish(
        Algorithm::Optimal,
        initial,
        flows,
        budgets,
        classes,
        best,
        initial_traffic,
        stats,
    )
}
