//! Acceptance suite. Runs without the libtest harness so that every criterion
//! prints its verdict; exits non-zero if any fails.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use common::{bound_instance, example_desired, example_initial, label, n, seeded_tree};
use trie_reconfig::experiment::{
    complexity_probe, generate_instance, run_multi_root, run_sweep, summarize, InstanceSpec,
    MultiRootConfig, SweepConfig, TrialResult,
};
use trie_reconfig::optimizer::Algorithm;
use trie_reconfig::{
    assign_prefix_labels, brute_force_oracle, optimize_bnb, optimize_greedy, plan_labels, simulate,
    BoundMode, EnergyBudget, FlowSet, NodeId, ReconfigPlan, TreeTopology,
};

type Verdict = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    ensure(elapsed < limit, || {
        format!("took {elapsed:?}, limit {limit:?}")
    })
}

fn worked_example() -> Verdict {
    let start = Instant::now();
    let plan = plan_labels(&example_initial(), &example_desired()).map_err(|e| e.to_string())?;
    let moving: BTreeSet<String> = plan
        .moving_nodes()
        .iter()
        .map(|&v| plan.initial().label(v).unwrap().to_string())
        .collect();
    ensure(
        moving == BTreeSet::from(["0.1.1".into(), "0.1.1.1".into()]),
        || format!("moving {moving:?}"),
    )?;
    for (v, desired, dist) in [(n(4), "0.2.2", 2), (n(5), "0.2.2.1", 4)] {
        let e = plan.entry(v).unwrap();
        ensure(e.anchor_label == Some(label("0.2")), || {
            format!("anchor of {v}: {:?}", e.anchor_label)
        })?;
        ensure(e.desired_label == Some(label(desired)), || {
            format!("desired of {v}: {:?}", e.desired_label)
        })?;
        ensure(e.move_distance == Some(dist), || {
            format!("distance of {v}: {:?}", e.move_distance)
        })?;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok("moving {011, 0111}, anchor 02, desired 022/0221, distances 2/4".into())
}

/// Every rooted 3-node tree, every budget vector in {0..3}³ and every
/// non-empty flow support over the six ordered pairs.
fn all_three_node_instances() -> Vec<(trie_reconfig::LabeledTree, FlowSet, EnergyBudget)> {
    let pairs: Vec<(u32, u32)> = (0..3)
        .flat_map(|s| (0..3).filter(move |&d| d != s).map(move |d| (s, d)))
        .collect();
    let mut out = Vec::new();
    for middle in 0..3u32 {
        let ends: Vec<u32> = (0..3).filter(|&v| v != middle).collect();
        let edges = [(n(middle), n(ends[0])), (n(middle), n(ends[1]))];
        for root in 0..3u32 {
            let topo = TreeTopology::from_undirected(n(root), (0..3).map(n), &edges).unwrap();
            let tree = assign_prefix_labels(&topo);
            for support in 1u32..64 {
                let flows = FlowSet::new(
                    pairs
                        .iter()
                        .enumerate()
                        .filter(|(i, _)| support >> i & 1 == 1)
                        .map(|(i, &(s, d))| (n(s), n(d), 1.0 + i as f64 / 8.0)),
                )
                .unwrap();
                for code in 0..64u32 {
                    let budgets = EnergyBudget::new((0..3).map(|v| (n(v), code >> (2 * v) & 3)));
                    out.push((tree.clone(), flows.clone(), budgets));
                }
            }
        }
    }
    out
}

fn oracle_equivalence() -> Verdict {
    let start = Instant::now();
    let mut checked = 0;
    for i in 0..500u64 {
        let size = 3 + (i % 3) as usize;
        let h_max = [1, 3, 10][(i / 3 % 3) as usize];
        let inst = generate_instance(InstanceSpec::new(size, h_max, 0xACCE_0000 + i)).unwrap();
        let bnb = optimize_bnb(
            &inst.tree,
            &inst.flows,
            &inst.budgets,
            BoundMode::Admissible,
        )
        .unwrap();
        let oracle = brute_force_oracle(&inst.tree, &inst.flows, &inst.budgets).unwrap();
        ensure(bnb.traffic == oracle.traffic, || {
            format!(
                "seed {}: bnb {} oracle {}",
                inst.spec.seed, bnb.traffic, oracle.traffic
            )
        })?;
        checked += 1;
    }
    let exhaustive = all_three_node_instances();
    for (t, f, b) in &exhaustive {
        let bnb = optimize_bnb(t, f, b, BoundMode::Admissible).unwrap();
        let oracle = brute_force_oracle(t, f, b).unwrap();
        ensure(bnb.traffic == oracle.traffic, || {
            format!("n = 3 instance differs: {f:?} {b:?}")
        })?;
    }
    within(start.elapsed(), Duration::from_secs(300))?;
    Ok(format!(
        "{checked} random (n <= 5) and {} exhaustive n = 3 instances equal",
        exhaustive.len()
    ))
}

fn sandwich(rows: &mut Vec<TrialResult>) -> Verdict {
    let mut count = 0;
    for i in 0..500u64 {
        let size = 3 + (i % 5) as usize;
        let h_max = [1, 3, 10][(i / 5 % 3) as usize];
        let inst = generate_instance(InstanceSpec::new(size, h_max, 0x5A4D_0000 + i)).unwrap();
        let greedy = optimize_greedy(&inst.tree, &inst.flows, &inst.budgets).unwrap();
        let best = optimize_bnb(
            &inst.tree,
            &inst.flows,
            &inst.budgets,
            BoundMode::Admissible,
        )
        .unwrap();
        ensure(
            best.traffic <= greedy.traffic && greedy.traffic <= greedy.initial_traffic,
            || {
                format!(
                    "seed {}: optimal {} greedy {} initial {}",
                    inst.spec.seed, best.traffic, greedy.traffic, greedy.initial_traffic
                )
            },
        )?;
        for r in [&greedy, &best] {
            rows.push(TrialResult {
                n: size,
                h_max,
                seed: inst.spec.seed,
                algorithm: r.algorithm,
                roots_considered: 1,
                traffic_initial: r.initial_traffic,
                traffic_final: r.traffic,
                explored: r.stats.nodes_explored,
                pruned: r.stats.nodes_pruned,
                ms: None,
                within_budget: r.plan.within_budget(&inst.budgets)
                    && r.plan.move_distance(inst.tree.root()) == 0,
            });
        }
        count += 1;
    }
    Ok(format!("0 violations over {count} instances, n in 3..7"))
}

fn check_plan(plan: &ReconfigPlan) -> Result<usize, String> {
    let trace = simulate(plan).map_err(|e| e.to_string())?;
    let nodes: BTreeSet<NodeId> = plan.initial().topology().nodes().collect();
    let root = plan.initial().root();
    for s in &trace.steps {
        ensure(s.connected && s.snapshot.is_connected(root, &nodes), || {
            format!("disconnected after moving {}", s.node)
        })?;
    }
    for &v in &nodes {
        ensure(trace.steps_of(v) == plan.move_distance(v), || {
            format!(
                "node {v}: {} steps, distance {}",
                trace.steps_of(v),
                plan.move_distance(v)
            )
        })?;
    }
    ensure(trace.final_tree == *plan.desired(), || {
        "final tree differs".into()
    })?;
    Ok(trace.steps.len())
}

fn connectivity() -> Verdict {
    let mut steps = 0;
    // Arbitrary reshapes with exactly sufficient budgets.
    for i in 0..1000u64 {
        let size = 1 + (i % 10) as usize;
        let initial = assign_prefix_labels(&seeded_tree(size, 2 * i));
        let desired = seeded_tree(size, 2 * i + 1);
        steps += check_plan(&plan_labels(&initial, &desired).map_err(|e| e.to_string())?)?;
    }
    // Plans the optimizers emit for random budgets.
    for i in 0..1000u64 {
        let size = 3 + (i % 8) as usize;
        let inst = generate_instance(InstanceSpec::new(
            size,
            [1, 3, 10][(i % 3) as usize],
            0xC0_0000 + i,
        ))
        .unwrap();
        steps += check_plan(
            &optimize_greedy(&inst.tree, &inst.flows, &inst.budgets)
                .unwrap()
                .plan,
        )?;
        if size <= 6 {
            let best = optimize_bnb(
                &inst.tree,
                &inst.flows,
                &inst.budgets,
                BoundMode::Admissible,
            )
            .unwrap();
            steps += check_plan(&best.plan)?;
        }
    }
    Ok(format!(
        "2000 instances, {steps} steps, all snapshots connected, step counts equal move distances"
    ))
}

fn traffic_vs_size(rows: &mut Vec<TrialResult>) -> Verdict {
    let start = Instant::now();
    let cfg = SweepConfig {
        sizes: vec![7],
        h_max_values: vec![1, 10],
        trials: 50,
        algorithms: vec![Algorithm::Optimal],
        total_flow: 1.0,
        ..SweepConfig::default()
    };
    let trials = run_sweep(&cfg).map_err(|e| e.to_string())?;
    let summary = summarize(&trials);
    rows.extend(trials);
    let mean = |h| {
        summary
            .iter()
            .find(|s| s.h_max == h)
            .unwrap()
            .mean_traffic_final
    };
    let (m1, m10) = (mean(1), mean(10));
    ensure((m1 - 2.0).abs() <= 0.3, || {
        format!("h_max = 1 mean {m1:.3}, expected 2.0 +- 0.3")
    })?;
    ensure((m10 - 1.6).abs() <= 0.3, || {
        format!("h_max = 10 mean {m10:.3}, expected 1.6 +- 0.3")
    })?;
    within(start.elapsed(), Duration::from_secs(1800))?;
    Ok(format!(
        "n = 7 optimal means {m1:.3} (h_max 1) and {m10:.3} (h_max 10)"
    ))
}

fn multi_root_trend(rows: &mut Vec<TrialResult>) -> Verdict {
    let cfg = MultiRootConfig::default();
    let trials = run_multi_root(&cfg).map_err(|e| e.to_string())?;
    let summary = summarize(&trials);
    rows.extend(trials);
    let mut worst = f64::NEG_INFINITY;
    for alg in [Algorithm::Greedy, Algorithm::Optimal] {
        for h in [1, 3, 10] {
            let cell: Vec<_> = summary
                .iter()
                .filter(|s| s.algorithm == alg && s.h_max == h)
                .collect();
            ensure(cell.len() == 5, || {
                format!("{alg} h_max {h}: {} cells", cell.len())
            })?;
            for w in cell.windows(2) {
                let pooled = ((w[0].sem_traffic_final.powi(2) + w[1].sem_traffic_final.powi(2))
                    / 2.0)
                    .sqrt();
                let rise = w[1].mean_traffic_final - w[0].mean_traffic_final;
                worst = worst.max(rise);
                ensure(rise <= pooled, || {
                    format!(
                        "{alg} h_max {h}: k {} -> {} mean rises {:.4} -> {:.4}",
                        w[0].roots_considered,
                        w[1].roots_considered,
                        w[0].mean_traffic_final,
                        w[1].mean_traffic_final
                    )
                })?;
            }
        }
    }
    Ok(format!(
        "means non-increasing in k = 1..5 for both algorithms (largest step {worst:+.4})"
    ))
}

fn complexity() -> Verdict {
    let rows = complexity_probe(3..=8, 5, 5).map_err(|e| e.to_string())?;
    let greedy: Vec<u64> = rows.iter().map(|r| r.greedy_evaluations).collect();
    ensure(greedy == [4, 10, 20, 35, 56, 84], || {
        format!("greedy counts {greedy:?}")
    })?;
    for r in rows.iter().filter(|r| r.n <= 5) {
        let leaves = r.bnb_leaves.unwrap_or(u64::MAX) as u128;
        ensure(leaves <= r.bnb_ceiling, || {
            format!("n = {}: {leaves} leaves > {}", r.n, r.bnb_ceiling)
        })?;
    }
    let leaves: Vec<String> = rows
        .iter()
        .filter_map(|r| r.bnb_leaves.map(|l| format!("{l}/{}", r.bnb_ceiling)))
        .collect();
    Ok(format!(
        "greedy {greedy:?}; bnb leaves/ceiling {}",
        leaves.join(", ")
    ))
}

fn budget_compliance(rows: &[TrialResult]) -> Verdict {
    let bad = rows.iter().filter(|r| !r.within_budget).count();
    ensure(bad == 0, || {
        format!(
            "{bad} of {} plans exceed a budget or move the root",
            rows.len()
        )
    })?;
    Ok(format!(
        "{} plans within budget, root never moves",
        rows.len()
    ))
}

fn bound_modes() -> Verdict {
    let (t, f, b) = bound_instance();
    let oracle = brute_force_oracle(&t, &f, &b).unwrap().traffic;
    let admissible = optimize_bnb(&t, &f, &b, BoundMode::Admissible)
        .unwrap()
        .traffic;
    let literal = optimize_bnb(&t, &f, &b, BoundMode::PaperLiteral)
        .unwrap()
        .traffic;
    ensure(admissible == oracle, || {
        format!("admissible {admissible} != oracle {oracle}")
    })?;
    ensure(literal > oracle, || {
        format!("paper-literal {literal} did not miss oracle {oracle}")
    })?;
    Ok(format!(
        "paper-literal {literal:.3} > oracle {oracle:.3} = admissible"
    ))
}

fn main() -> ExitCode {
    let mut rows = Vec::new();
    let mut failed = 0;
    let mut report = |id: u32, name: &str, verdict: Verdict| match verdict {
        Ok(detail) => println!("PASS {id} {name}: {detail}"),
        Err(detail) => {
            failed += 1;
            println!("FAIL {id} {name}: {detail}");
        }
    };
    report(1, "worked example", worked_example());
    report(2, "oracle equivalence", oracle_equivalence());
    report(3, "sandwich property", sandwich(&mut rows));
    report(4, "connectivity preservation", connectivity());
    report(5, "traffic vs size at n = 7", traffic_vs_size(&mut rows));
    report(6, "multi-root trend at n = 5", multi_root_trend(&mut rows));
    report(7, "complexity counters", complexity());
    report(8, "budget compliance", budget_compliance(&rows));
    report(9, "bound-mode comparison", bound_modes());
    if failed == 0 {
        println!("acceptance: 9/9 criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of 9 criteria failed");
        ExitCode::FAILURE
    }
}
