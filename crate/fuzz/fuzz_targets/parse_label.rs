#![no_main]

use libfuzzer_sys::fuzz_target;
use trie_reconfig::io::parse_label;

fuzz_target!(|text: &str| {
    let Ok(label) = parse_label(text) else { return };
    assert_eq!(parse_label(&label.to_string()).unwrap(), label);
    assert_eq!(label.distance(&label), 0);
});
