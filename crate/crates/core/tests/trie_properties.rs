mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::{bfs_distance, bfs_traffic, example_initial, label, n, seeded_tree};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use trie_reconfig::{
    aggregate_traffic, assign_prefix_labels, common_prefix_length, random_tree, trie_distance,
    FlowSet, LabeledTree, NodeId, TreeTopology,
};

#[test]
fn example_labels() {
    let t = example_initial();
    let want = ["0", "0.1", "0.2", "0.3", "0.1.1", "0.1.1.1", "0.2.1"];
    for (i, l) in want.iter().enumerate() {
        assert_eq!(t.label(n(i as u32)), Some(&label(l)), "node {i}");
    }
}

#[test]
fn single_node_and_pair() {
    let one = seeded_tree(1, 3);
    assert_eq!(one.len(), 1);
    assert_eq!(
        assign_prefix_labels(&one).label(one.root()),
        Some(&label("0"))
    );
    let two = seeded_tree(2, 3);
    assert_eq!(two.edges().collect::<Vec<_>>(), vec![(n(0), n(1))]);
}

#[test]
fn prefix_lengths() {
    assert_eq!(common_prefix_length(&label("0.1.1"), &label("0.2.1")), 1);
    assert_eq!(
        common_prefix_length(&label("0.2.2.1"), &label("0.2.2.1")),
        4
    );
    assert_eq!(common_prefix_length(&label("0"), &label("0.1.1.1")), 1);
}

#[test]
fn example_distances_match_bfs() {
    let t = example_initial();
    assert_eq!(trie_distance(&t, n(4), n(6)).unwrap(), 4);
    assert_eq!(trie_distance(&t, n(5), n(2)).unwrap(), 4);
    assert_eq!(trie_distance(&t, n(3), n(3)).unwrap(), 0);
    assert_eq!(bfs_distance(t.topology(), n(4), n(6)), 4);
}

#[test]
fn example_traffic() {
    let t = example_initial();
    let flows = FlowSet::new([(n(4), n(6), 0.5), (n(5), n(0), 0.25)]).unwrap();
    assert_eq!(aggregate_traffic(&t, &flows).unwrap(), 2.75);
    assert_eq!(aggregate_traffic(&t, &FlowSet::empty()).unwrap(), 0.0);
    let adjacent = FlowSet::new([(n(1), n(0), 1.0)]).unwrap();
    assert_eq!(aggregate_traffic(&t, &adjacent).unwrap(), 1.0);
}

#[test]
fn unknown_flow_endpoint_is_rejected() {
    let flows = FlowSet::new([(n(1), n(42), 1.0)]).unwrap();
    assert!(aggregate_traffic(&example_initial(), &flows).is_err());
}

/// Metric axioms checked exhaustively over every node triple.
#[test]
fn trie_distance_is_a_metric() {
    for size in 1..=8 {
        for seed in 0..25 {
            let t = assign_prefix_labels(&seeded_tree(size, seed));
            let nodes: Vec<NodeId> = t.topology().nodes().collect();
            for &a in &nodes {
                for &b in &nodes {
                    let ab = trie_distance(&t, a, b).unwrap();
                    assert_eq!(ab, trie_distance(&t, b, a).unwrap());
                    assert_eq!(ab == 0, a == b);
                    for &c in &nodes {
                        let via = ab + trie_distance(&t, b, c).unwrap();
                        assert!(trie_distance(&t, a, c).unwrap() <= via);
                    }
                }
            }
        }
    }
}

/// Cayley: 16 labeled trees on 4 nodes, each equally likely.
#[test]
fn random_trees_are_uniform() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut counts: BTreeMap<BTreeSet<(NodeId, NodeId)>, u32> = BTreeMap::new();
    let draws = 10_000;
    for _ in 0..draws {
        let t = random_tree(4, &mut rng).unwrap();
        let shape = t.edges().map(|(a, b)| (a.min(b), a.max(b))).collect();
        *counts.entry(shape).or_default() += 1;
    }
    assert_eq!(counts.len(), 16);
    let expected = draws as f64 / 16.0;
    let chi2: f64 = counts
        .values()
        .map(|&c| (c as f64 - expected).powi(2) / expected)
        .sum();
    // 99th percentile of chi-squared with 15 degrees of freedom.
    assert!(chi2 < 30.578, "chi2 = {chi2}");
}

fn arb_tree() -> impl Strategy<Value = TreeTopology> {
    (1usize..=14, any::<u64>()).prop_map(|(size, seed)| seeded_tree(size, seed))
}

fn arb_tree_with_flows() -> impl Strategy<Value = (LabeledTree, FlowSet)> {
    arb_tree().prop_flat_map(|t| {
        let size = t.len() as u32;
        let pairs = proptest::collection::vec((0..size, 0..size, 0.0f64..5.0), 0..20);
        (Just(t), pairs).prop_map(|(t, pairs)| {
            let mut seen = BTreeSet::new();
            let flows = pairs
                .into_iter()
                .filter(|&(s, d, _)| s != d && seen.insert((s, d)))
                .map(|(s, d, r)| (n(s), n(d), r));
            (assign_prefix_labels(&t), FlowSet::new(flows).unwrap())
        })
    })
}

proptest! {
    #[test]
    fn label_distance_equals_bfs(t in arb_tree()) {
        let lt = assign_prefix_labels(&t);
        for a in t.nodes() {
            for b in t.nodes() {
                prop_assert_eq!(trie_distance(&lt, a, b).unwrap(), bfs_distance(&t, a, b));
            }
        }
    }

    #[test]
    fn labels_rebuild_the_topology(t in arb_tree()) {
        let lt = assign_prefix_labels(&t);
        let rebuilt = LabeledTree::from_labels(lt.labels().clone()).unwrap();
        prop_assert_eq!(rebuilt.topology(), &t);
        for v in t.nodes() {
            let l = lt.label(v).unwrap();
            match t.parent(v) {
                None => prop_assert_eq!(l.len(), 1),
                Some(p) => prop_assert_eq!(lt.label(p).cloned(), l.parent()),
            }
        }
    }

    #[test]
    fn traffic_matches_bfs_and_is_linear((t, flows) in arb_tree_with_flows(), k in 0.0f64..8.0) {
        let base = aggregate_traffic(&t, &flows).unwrap();
        let oracle = bfs_traffic(t.topology(), &flows);
        prop_assert!((base - oracle).abs() <= 1e-9 * oracle.max(1.0));
        let doubled = aggregate_traffic(&t, &flows.scaled(2.0)).unwrap();
        prop_assert_eq!(doubled, 2.0 * base);
        let scaled = aggregate_traffic(&t, &flows.scaled(k)).unwrap();
        prop_assert!((scaled - k * base).abs() <= 1e-9 * (k * base).max(1.0));
    }
}
