#![no_main]

use libfuzzer_sys::fuzz_target;
use statecross::text::{parse_vocabulary, serialize_vocabulary};

fuzz_target!(|data: &[u8]| {
    let Ok(src) = std::str::from_utf8(data) else { return };
    let Ok(v) = parse_vocabulary(src) else { return };
    assert_eq!(parse_vocabulary(&serialize_vocabulary(&v)).expect("serialized vocabulary parses"), v);
});
