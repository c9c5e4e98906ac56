#![no_main]

use libfuzzer_sys::fuzz_target;
use trie_reconfig::assign_prefix_labels;
use trie_reconfig::io::{parse_topology, topology_to_json};
use trie_reconfig::LabeledTree;

fuzz_target!(|text: &str| {
    let Ok(topo) = parse_topology(text) else {
        return;
    };
    assert_eq!(parse_topology(&topology_to_json(&topo)).unwrap(), topo);
    let labeled = assign_prefix_labels(&topo);
    let rebuilt = LabeledTree::from_labels(labeled.labels().clone()).unwrap();
    assert_eq!(rebuilt.topology(), &topo);
});
