#![no_main]

use libfuzzer_sys::fuzz_target;
use statecross::model::Vocabulary;
use statecross::pipeline::self_diff;
use statecross::text::{parse_statemachine, serialize_statemachine};

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(m) = parse_statemachine(src) else { return };
    let again = parse_statemachine(&serialize_statemachine(&m)).expect("serialized machine parses");
    assert_eq!(again, m);
    let _ = self_diff(&m, &Vocabulary::new());
});
