#![no_main]

use libfuzzer_sys::fuzz_target;
use trie_reconfig::io::{flows_to_json, parse_flows};

fuzz_target!(|text: &str| {
    let Ok(flows) = parse_flows(text, None) else {
        return;
    };
    assert_eq!(parse_flows(&flows_to_json(&flows), None).unwrap(), flows);
});
