#![no_main]

use libfuzzer_sys::fuzz_target;
use statecross::extract::extract;
use statecross::text::{parse_workflow, serialize_workflow, validate_workflow};

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(w) = parse_workflow(src) else { return };
    let again = parse_workflow(&serialize_workflow(&w)).expect("serialized workflow parses");
    assert_eq!(again, w);
    let partitions: Vec<String> = w.nodes.iter().map(|n| n.partition.clone()).collect();
    for p in partitions {
        if validate_workflow(&w, &p).iter().all(|d| !d.is_error()) {
            let _ = extract(&w, &p);
        }
    }
});
