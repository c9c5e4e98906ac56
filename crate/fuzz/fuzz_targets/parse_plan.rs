#![no_main]

use libfuzzer_sys::fuzz_target;
use trie_reconfig::io::{parse_plan, plan_to_json};
use trie_reconfig::{assign_prefix_labels, simulate, NodeId, TreeTopology};

fuzz_target!(|text: &str| {
    let n = NodeId;
    // Same tree as the checked-in seeds.
    let topo = TreeTopology::new(
        n(0),
        [
            (n(0), n(1)),
            (n(0), n(2)),
            (n(0), n(3)),
            (n(1), n(4)),
            (n(4), n(5)),
            (n(2), n(6)),
        ],
    )
    .unwrap();
    let initial = assign_prefix_labels(&topo);
    let Ok(plan) = parse_plan(text, &initial) else {
        return;
    };
    assert_eq!(parse_plan(&plan_to_json(&plan), &initial).unwrap(), plan);
    // Plans from files may be wrong; replaying them must fail cleanly.
    let _ = simulate(&plan);
});
