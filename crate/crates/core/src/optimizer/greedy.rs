use super::work::{Problem, WorkingGraph};
use super::{classify, finish, validate, Algorithm, OptimizeError, SearchResult, SearchStats};
use crate::budget::EnergyBudget;
use crate::flow::FlowSet;
use crate::tree::LabeledTree;

/// Places active movers one at a time, each round committing the
/// (mover, position) pair whose attachment gives the working graph the least
/// traffic.
///
/// Ties go to the lowest mover identifier, then the lowest position
/// identifier. If the finished tree does not beat the initial one, the initial
/// topology is kept.
pub fn optimize_greedy(
    initial: &LabeledTree,
    flows: &FlowSet,
    budgets: &EnergyBudget,
) -> Result<SearchResult, OptimizeError> {
    let initial_traffic = validate(initial, flows, budgets)?;
    let classes = classify(initial, flows, budgets);
    if classes.active_moving.is_empty() {
        return finish(
            Algorithm::Greedy,
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
    let mut graph = WorkingGraph::from_skeleton(&problem, &classes.skeleton);
    let mut unplaced = problem.active.clone();
    let mut stats = SearchStats::default();

    while !unplaced.is_empty() {
        let positions = graph.sorted_members();
        let mut choice: Option<(f64, usize, usize)> = None;
        for (slot, &x) in unplaced.iter().enumerate() {
            for &u in &positions {
                stats.nodes_explored += 1;
                if graph.move_cost(&problem, x, u) > problem.budget[x] {
                    continue;
                }
                graph.attach(&problem, x, u);
                let t = graph.traffic(&problem);
                graph.detach_last();
                if choice.is_none_or(|(best, _, _)| t < best) {
                    choice = Some((t, slot, u));
                }
            }
        }
        let (slot, u) = match choice {
            Some((_, slot, u)) => (slot, u),
            None => {
                // Unreachable when classification holds: hanging a mover from
                // its nearest skeleton ancestor always fits its budget.
                stats.fallbacks += 1;
                (0, problem.skeleton_ancestor[unplaced[0]])
            }
        };
        let x = unplaced.remove(slot);
        graph.attach(&problem, x, u);
    }
    stats.leaves = 1;

    let placed = (graph.traffic(&problem) < initial_traffic).then(|| graph.to_topology(&problem));
    finish(
        Algorithm::Greedy,
        initial,
        flows,
        budgets,
        classes,
        placed,
        initial_traffic,
        stats,
    )
}
