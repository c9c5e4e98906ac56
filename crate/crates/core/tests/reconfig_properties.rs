mod common;

use common::seeded_tree;
use proptest::prelude::*;
use trie_reconfig::experiment::{generate_instance, InstanceSpec};
use trie_reconfig::{
    assign_prefix_labels, feasible, optimize_bnb, optimize_greedy, plan_labels, simulate,
    BoundMode, EnergyBudget, ReconfigPlan,
};

fn check_trace(plan: &ReconfigPlan) -> Result<(), TestCaseError> {
    let trace = simulate(plan).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let nodes = plan.initial().topology().nodes().collect();
    let root = plan.initial().root();
    for s in &trace.steps {
        prop_assert!(s.connected);
        prop_assert!(s.snapshot.is_connected(root, &nodes));
    }
    for v in plan.initial().topology().nodes() {
        prop_assert_eq!(trace.steps_of(v), plan.move_distance(v), "node {}", v);
    }
    prop_assert_eq!(&trace.final_tree, plan.desired());
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    /// Arbitrary reshapes, with each node given exactly the budget it needs.
    #[test]
    fn arbitrary_reshapes_stay_connected(size in 1usize..=10, a in any::<u64>(), b in any::<u64>()) {
        let initial = assign_prefix_labels(&seeded_tree(size, a));
        let desired = seeded_tree(size, b);
        let plan = plan_labels(&initial, &desired).unwrap();
        prop_assert_eq!(plan.desired().topology(), &desired);

        let tight = EnergyBudget::new(desired.nodes().map(|v| (v, plan.move_distance(v) as u32)));
        prop_assert!(feasible(&initial, &desired, &tight));
        if let Some(v) = desired.nodes().find(|&v| plan.move_distance(v) > 0) {
            let short = EnergyBudget::new(desired.nodes().map(|u| {
                let h = plan.move_distance(u) as u32;
                (u, if u == v { h - 1 } else { h })
            }));
            prop_assert!(!feasible(&initial, &desired, &short));
        }

        // Moving sets are closed under initial-tree descendants.
        let moving = plan.moving_nodes();
        for &v in &moving {
            for d in initial.topology().descendants(v) {
                prop_assert!(moving.contains(&d));
            }
        }
        prop_assert!(!moving.contains(&initial.root()));
        check_trace(&plan)?;
    }

    /// Plans the optimizers actually emit.
    #[test]
    fn optimized_plans_stay_connected(size in 3usize..=8, h_max in 0u32..=6, seed in any::<u64>()) {
        let inst = generate_instance(InstanceSpec::new(size, h_max, seed)).unwrap();
        let greedy = optimize_greedy(&inst.tree, &inst.flows, &inst.budgets).unwrap();
        check_trace(&greedy.plan)?;
        if size <= 6 {
            let best = optimize_bnb(&inst.tree, &inst.flows, &inst.budgets, BoundMode::Admissible).unwrap();
            check_trace(&best.plan)?;
        }
    }

    #[test]
    fn planning_the_current_tree_moves_nothing(size in 1usize..=12, seed in any::<u64>()) {
        let t = assign_prefix_labels(&seeded_tree(size, seed));
        let plan = plan_labels(&t, t.topology()).unwrap();
        prop_assert!(plan.is_identity());
        prop_assert!(plan.moving_nodes().is_empty());
        prop_assert!(simulate(&plan).unwrap().steps.is_empty());
    }
}
