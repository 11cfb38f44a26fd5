use proptest::prelude::*;
use statecross::text::{
    parse_statemachine, parse_vocabulary, parse_workflow, serialize_statemachine, serialize_vocabulary,
    serialize_workflow,
};

const SEEDS: [&str; 3] = [
    include_str!("../../../fixtures/layered.wf"),
    include_str!("../../../fixtures/layered.sm"),
    include_str!("../../../fixtures/relay.vocab"),
];

/// Fixture text with a few byte ranges replaced by short random fragments.
fn mutated() -> impl Strategy<Value = String> {
    let fragment = prop::sample::select(vec![
        "", "\"", "{", "}", "\n", "->", "[", "]", "/", ",", "state", "node", "edge", "initial", "final", "in", "\\",
        "é", "guard", "alias", "canon", "on",
    ]);
    (0..SEEDS.len(), prop::collection::vec((any::<prop::sample::Index>(), 0usize..6, fragment), 1..5)).prop_map(
        |(seed, edits)| {
            let mut s = SEEDS[seed].to_string();
            for (at, len, frag) in edits {
                let mut start = at.index(s.len() + 1);
                while !s.is_char_boundary(start) {
                    start -= 1;
                }
                let mut end = (start + len).min(s.len());
                while !s.is_char_boundary(end) {
                    end -= 1;
                }
                s.replace_range(start..end, frag);
            }
            s
        },
    )
}

fn check_all(src: &str) {
    if let Ok(w) = parse_workflow(src) {
        assert_eq!(parse_workflow(&serialize_workflow(&w)).unwrap(), w);
    }
    if let Ok(m) = parse_statemachine(src) {
        assert_eq!(parse_statemachine(&serialize_statemachine(&m)).unwrap(), m);
    }
    if let Ok(v) = parse_vocabulary(src) {
        assert_eq!(parse_vocabulary(&serialize_vocabulary(&v)).unwrap(), v);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn arbitrary_text(src in ".{0,200}") {
        check_all(&src);
    }

    #[test]
    fn mutated_fixtures(src in mutated()) {
        check_all(&src);
    }
}
