#![no_main]

use libfuzzer_sys::fuzz_target;
use trie_reconfig::io::{budgets_to_json, parse_budgets};
use trie_reconfig::{NodeId, TreeTopology};

fuzz_target!(|text: &str| {
    let n = NodeId;
    let topo = TreeTopology::new(n(0), [(n(0), n(1)), (n(1), n(2)), (n(0), n(3))]).unwrap();
    let Ok(budgets) = parse_budgets(text, &topo) else {
        return;
    };
    assert_eq!(
        parse_budgets(&budgets_to_json(&budgets), &topo).unwrap(),
        budgets
    );
});
