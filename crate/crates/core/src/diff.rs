//! State, transition and behavior differences between a classified
//! extraction model and an evaluation model.

use std::collections::{HashMap, HashSet};

use indexmap::{IndexMap, IndexSet};

use crate::classify::{names_contained_in, LayerSpec};
use crate::judgment::child_index;
use crate::model::{
    transition_ref, Category, Class, Classification, Element, ExtractionModel, Finding, Label, ScopePath, State,
    StateMachine, Step, Transition, Vocabulary, WorkflowRef,
};

/// Problems A, B and C for one layer.
pub fn diff_states(c: &Classification, layer: &LayerSpec, x: &ExtractionModel) -> Vec<Finding> {
    let scope = &c.scope;
    let mut out = Vec::new();
    for (s, class) in &c.assignments {
        if *class != Class::Unknown {
            continue;
        }
        let mut f = Finding::new(
            Category::ExcessState,
            scope.clone(),
            format!("extraction state {s} matches no evaluation state"),
        );
        f.extraction_refs.push(s.clone());
        f.workflow_refs = x.state_refs(s).into_iter().collect();
        out.push(f);
    }
    for id in layer.names.keys() {
        if c.members(&Class::State(id.clone())).is_empty() {
            let mut f = Finding::new(
                Category::MissingState,
                scope.clone(),
                format!("evaluation state {id} has no extraction counterpart"),
            );
            f.evaluation_refs.push(id.clone());
            out.push(f);
        }
    }
    let mut matched: HashSet<&str> = HashSet::new();
    for s in c.assignments.keys() {
        if let Some(state) = x.machine.state(s) {
            matched.extend(names_contained_in(&state.name, layer));
        }
    }
    for (id, name) in &layer.names {
        if !matched.contains(id.as_str()) {
            let mut f = Finding::new(
                Category::StateNameUnmatched,
                scope.clone(),
                format!("no extraction state name contains {name:?} ({id})"),
            );
            f.evaluation_refs.push(id.clone());
            out.push(f);
        }
    }
    out
}

/// Transitions of one layer bucketed by (source class, target class).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TransitionTable {
    pub scope: ScopePath,
    pub cells: IndexMap<(Class, Class), Vec<usize>>,
}

impl TransitionTable {
    fn empty(scope: &ScopePath, classes: &[Class]) -> Self {
        let mut cells = IndexMap::new();
        for a in classes {
            for b in classes {
                cells.insert((a.clone(), b.clone()), Vec::new());
            }
        }
        TransitionTable { scope: scope.clone(), cells }
    }

    pub fn total(&self) -> usize {
        self.cells.values().map(Vec::len).sum()
    }

    pub fn get(&self, from: &Class, to: &Class) -> &[usize] {
        self.cells.get(&(from.clone(), to.clone())).map(Vec::as_slice).unwrap_or(&[])
    }
}

/// Extraction transitions whose endpoints are both classified at this layer
/// (unknown included).
pub fn build_extraction_table(x: &ExtractionModel, c: &Classification, layer: &LayerSpec) -> TransitionTable {
    let mut classes: Vec<Class> = layer.names.keys().map(|id| Class::State(id.clone())).collect();
    classes.push(Class::Unknown);
    let mut table = TransitionTable::empty(&c.scope, &classes);
    for (i, t) in x.machine.transitions.iter().enumerate() {
        let (Some(a), Some(b)) = (c.class_of(&t.source), c.class_of(&t.target)) else {
            continue;
        };
        table.cells.entry((a.clone(), b.clone())).or_default().push(i);
    }
    table
}

/// The leaf a transition into `s` ends up in: follow initial children (or the
/// first child) down.
fn landing(s: &State) -> &State {
    match s.children.iter().find(|c| c.is_initial_in_parent).or(s.children.first()) {
        Some(c) => landing(c),
        None => s,
    }
}

/// Evaluation transitions with both ends under the scope, classed by the
/// direct child containing each end. A composite target counts as its
/// landing leaf.
pub fn build_evaluation_table(m: &StateMachine, scope: &ScopePath) -> TransitionTable {
    let children = m.scope_children(scope).unwrap_or(&[]);
    let classes: Vec<Class> = children.iter().map(|s| Class::State(s.id.clone())).collect();
    let mut table = TransitionTable::empty(scope, &classes);
    let owner = child_index(children);
    for (i, t) in m.transitions.iter().enumerate() {
        let target = m.state(&t.target).map(|s| landing(s).id.as_str()).unwrap_or(&t.target);
        let (Some(a), Some(b)) = (owner.get(t.source.as_str()), owner.get(target)) else {
            continue;
        };
        table.cells.entry((Class::State(a.to_string()), Class::State(b.to_string()))).or_default().push(i);
    }
    table
}

fn canon_opt(l: &Option<Label>, vocab: &Vocabulary) -> Option<Label> {
    l.as_ref().map(|l| vocab.canonicalize(l))
}

fn trigger(t: &Transition, vocab: &Vocabulary) -> (Option<Label>, Option<Label>) {
    (canon_opt(&t.event, vocab), canon_opt(&t.guard, vocab))
}

fn full_key(t: &Transition, vocab: &Vocabulary) -> (Option<Label>, Option<Label>, Vec<Label>) {
    let (e, g) = trigger(t, vocab);
    (e, g, t.actions.iter().map(|a| vocab.canonicalize(a)).collect())
}

fn describe(t: &Transition) -> String {
    let mut parts = Vec::new();
    if let Some(e) = &t.event {
        parts.push(format!("on {e:?}", e = e.as_str()));
    }
    if let Some(g) = &t.guard {
        parts.push(format!("[{:?}]", g.as_str()));
    }
    if !t.actions.is_empty() {
        let acts: Vec<String> = t.actions.iter().map(|a| format!("{:?}", a.as_str())).collect();
        parts.push(format!("/ {}", acts.join(", ")));
    }
    if parts.is_empty() {
        format!("{} -> {} (unconditional)", t.source, t.target)
    } else {
        format!("{} -> {} {}", t.source, t.target, parts.join(" "))
    }
}

/// Matches transitions cell by cell: exact behaviors first, then same
/// event and guard, then, when both sides have the same number left over,
/// in declaration order. Matches past the first stage are reported as
/// behavior mismatches; anything unmatched is a count mismatch.
pub fn diff_transitions(
    tx: &TransitionTable,
    te: &TransitionTable,
    x: &ExtractionModel,
    m: &StateMachine,
    vocab: &Vocabulary,
) -> Vec<Finding> {
    let mut keys: IndexSet<&(Class, Class)> = tx.cells.keys().collect();
    keys.extend(te.cells.keys());
    let mut out = Vec::new();
    for key in keys {
        let xs = tx.get(&key.0, &key.1);
        let es = te.get(&key.0, &key.1);
        if xs.is_empty() && es.is_empty() {
            continue;
        }
        let xt = |i: usize| &x.machine.transitions[i];
        let et = |i: usize| &m.transitions[i];
        let mut x_left: Vec<usize> = Vec::new();
        let mut e_used = vec![false; es.len()];
        for &i in xs {
            let k = full_key(xt(i), vocab);
            match (0..es.len()).find(|&j| !e_used[j] && full_key(et(es[j]), vocab) == k) {
                Some(j) => e_used[j] = true,
                None => x_left.push(i),
            }
        }
        let mut pairs = Vec::new();
        let mut x_rest = Vec::new();
        for i in x_left {
            let k = trigger(xt(i), vocab);
            match (0..es.len()).find(|&j| !e_used[j] && trigger(et(es[j]), vocab) == k) {
                Some(j) => {
                    e_used[j] = true;
                    pairs.push((i, es[j]));
                }
                None => x_rest.push(i),
            }
        }
        let e_rest: Vec<usize> = (0..es.len()).filter(|&j| !e_used[j]).map(|j| es[j]).collect();
        if x_rest.len() == e_rest.len() {
            pairs.extend(x_rest.iter().copied().zip(e_rest.iter().copied()));
        } else {
            let mut f = Finding::new(
                Category::TransitionCountMismatch,
                tx.scope.clone(),
                format!(
                    "{} -> {}: {} extraction vs {} evaluation transitions; unmatched extraction [{}]; unmatched evaluation [{}]",
                    key.0,
                    key.1,
                    xs.len(),
                    es.len(),
                    x_rest.iter().map(|&i| describe(xt(i))).collect::<Vec<_>>().join("; "),
                    e_rest.iter().map(|&i| describe(et(i))).collect::<Vec<_>>().join("; "),
                ),
            );
            f.extraction_refs = x_rest.iter().map(|&i| transition_ref(i)).collect();
            f.evaluation_refs = e_rest.iter().map(|&i| transition_ref(i)).collect();
            f.workflow_refs =
                x_rest.iter().flat_map(|&i| x.transition_refs(i)).collect::<IndexSet<_>>().into_iter().collect();
            f.cell = Some(key.clone());
            out.push(f);
        }
        for (i, j) in pairs {
            let mut f = Finding::new(
                Category::TransitionBehaviorMismatch,
                tx.scope.clone(),
                format!("{} -> {}: extraction {} vs evaluation {}", key.0, key.1, describe(xt(i)), describe(et(j))),
            );
            f.extraction_refs.push(transition_ref(i));
            f.evaluation_refs.push(transition_ref(j));
            f.workflow_refs = x.transition_refs(i).into_iter().collect();
            f.cell = Some(key.clone());
            out.push(f);
        }
    }
    out
}

/// One behavior occurrence: canonical form, written form, and where it
/// came from (reference string and provenance element) on the extraction side.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Occurrence {
    pub canon: Label,
    pub raw: Label,
    pub origin: Option<(String, Element)>,
}

/// Result of comparing two behavior sequences.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SeqDiff {
    /// Indices into the first sequence with no counterpart in the second.
    pub missing: Vec<usize>,
    /// Indices into the second sequence with no counterpart in the first.
    pub excess: Vec<usize>,
    pub order_differs: bool,
    /// Canonical labels written differently on the two sides, with the
    /// written forms of each side.
    pub wording: Vec<(Label, Vec<Label>, Vec<Label>)>,
}

fn lcs_len(a: &[&Label], b: &[&Label]) -> usize {
    let mut prev = vec![0usize; b.len() + 1];
    for x in a {
        let mut cur = vec![0usize; b.len() + 1];
        for (j, y) in b.iter().enumerate() {
            cur[j + 1] = if x == y { prev[j] + 1 } else { prev[j + 1].max(cur[j]) };
        }
        prev = cur;
    }
    prev[b.len()]
}

fn label_counts(s: &[Occurrence]) -> HashMap<&Label, usize> {
    let mut m: HashMap<&Label, usize> = HashMap::new();
    for o in s {
        *m.entry(&o.canon).or_default() += 1;
    }
    m
}

/// Splits `s` into the labels it shares with `other` (as a multiset, first
/// occurrences first) and the indices of those it does not.
fn split_common<'a>(s: &'a [Occurrence], other: &HashMap<&Label, usize>) -> (Vec<&'a Label>, Vec<usize>) {
    let mut budget: HashMap<&Label, usize> = other.clone();
    let mut common = Vec::new();
    let mut left = Vec::new();
    for (i, o) in s.iter().enumerate() {
        match budget.get_mut(&o.canon) {
            Some(n) if *n > 0 => {
                *n -= 1;
                common.push(&o.canon);
            }
            _ => left.push(i),
        }
    }
    (common, left)
}

/// Compares an expected sequence `a` against an actual sequence `b`.
pub fn compare_sequences(a: &[Occurrence], b: &[Occurrence]) -> SeqDiff {
    let (ca, cb) = (label_counts(a), label_counts(b));
    let (common_a, missing) = split_common(a, &cb);
    let (common_b, excess) = split_common(b, &ca);
    let order_differs = lcs_len(&common_a, &common_b) < common_a.len();

    let mut wording = Vec::new();
    let mut done: HashSet<&Label> = HashSet::new();
    for o in a {
        if !cb.contains_key(&o.canon) || !done.insert(&o.canon) {
            continue;
        }
        let raws = |s: &[Occurrence]| -> Vec<Label> {
            let set: IndexSet<Label> = s.iter().filter(|p| p.canon == o.canon).map(|p| p.raw.clone()).collect();
            set.into_iter().collect()
        };
        let (ra, rb) = (raws(a), raws(b));
        let sa: HashSet<&Label> = ra.iter().collect();
        let sb: HashSet<&Label> = rb.iter().collect();
        if sa != sb {
            wording.push((o.canon.clone(), ra, rb));
        }
    }
    SeqDiff { missing, excess, order_differs, wording }
}

fn occurrence(l: &Label, vocab: &Vocabulary, origin: Option<(String, Element)>) -> Occurrence {
    Occurrence { canon: vocab.canonicalize(l), raw: l.clone(), origin }
}

/// Entry actions of `state`, then the behaviors of its outgoing transitions
/// in declaration order.
fn state_sequence(m: &StateMachine, state: &State, vocab: &Vocabulary, with_origin: bool) -> Vec<Occurrence> {
    let mut out = Vec::new();
    for (index, e) in state.entry_actions.iter().enumerate() {
        let origin = with_origin.then(|| (state.id.clone(), Element::Entry { state: state.id.clone(), index }));
        out.push(occurrence(e, vocab, origin));
    }
    for (ti, t) in m.transitions.iter().enumerate().filter(|(_, t)| t.source == state.id) {
        let r = transition_ref(ti);
        if let Some(e) = &t.event {
            out.push(occurrence(e, vocab, with_origin.then(|| (r.clone(), Element::Event(ti)))));
        }
        if let Some(g) = &t.guard {
            out.push(occurrence(g, vocab, with_origin.then(|| (r.clone(), Element::Guard(ti)))));
        }
        for (index, a) in t.actions.iter().enumerate() {
            let origin = with_origin.then(|| (r.clone(), Element::Action { transition: ti, index }));
            out.push(occurrence(a, vocab, origin));
        }
    }
    out
}

fn all_extraction_labels(x: &ExtractionModel, vocab: &Vocabulary) -> HashSet<Label> {
    let mut out = HashSet::new();
    for s in x.machine.states() {
        out.extend(s.entry_actions.iter().map(|l| vocab.canonicalize(l)));
    }
    for t in &x.machine.transitions {
        out.extend(t.behaviors().into_iter().map(|l| vocab.canonicalize(l)));
    }
    out
}

/// Behavior comparison for every leaf evaluation state against the
/// extraction states classified into it, plus labels that every column of
/// a layer requires but the extraction never mentions.
pub fn diff_behaviors(
    layers: &[(LayerSpec, Classification)],
    x: &ExtractionModel,
    m: &StateMachine,
    vocab: &Vocabulary,
) -> Vec<Finding> {
    let mut out = Vec::new();
    let present = all_extraction_labels(x, vocab);
    let mut global: IndexSet<Label> = IndexSet::new();
    for (layer, _) in layers {
        let cols: Vec<&Vec<Label>> = layer.judgment.columns.values().collect();
        if cols.len() < 2 {
            continue;
        }
        for l in cols[0] {
            if present.contains(l) || global.contains(l) || !cols.iter().all(|c| c.contains(l)) {
                continue;
            }
            global.insert(l.clone());
            let mut f = Finding::new(
                Category::GlobalBehaviorMissing,
                layer.scope().clone(),
                format!(
                    "behavior {:?} is required in every state of this layer but absent from the extraction",
                    l.as_str()
                ),
            );
            f.evaluation_refs = layer.names.keys().cloned().collect();
            out.push(f);
        }
    }

    for (layer, c) in layers {
        for id in layer.names.keys() {
            let Some(state) = m.state(id) else { continue };
            if state.is_composite() {
                continue;
            }
            let members = c.members(&Class::State(id.clone()));
            if members.is_empty() {
                continue;
            }
            let scope = layer.scope().child(id);
            let expected = state_sequence(m, state, vocab, false);
            let mut actual = Vec::new();
            for s in &members {
                if let Some(xs) = x.machine.state(s) {
                    actual.extend(state_sequence(&x.machine, xs, vocab, true));
                }
            }
            let d = compare_sequences(&expected, &actual);
            let member_refs: Vec<String> = members.iter().map(|s| s.to_string()).collect();

            for (canon, raw_e, raw_x) in &d.wording {
                let mut f = Finding::new(
                    Category::BehaviorWordingMismatch,
                    scope.clone(),
                    format!(
                        "{:?} is written {} in the evaluation and {} in the extraction",
                        canon.as_str(),
                        quoted(raw_e),
                        quoted(raw_x)
                    ),
                );
                f.extraction_refs = member_refs.clone();
                f.evaluation_refs.push(id.clone());
                f.workflow_refs = refs_of(x, actual.iter().filter(|o| o.canon == *canon));
                out.push(f);
            }
            if d.order_differs {
                let show = |s: &[Occurrence]| quoted(&s.iter().map(|o| o.raw.clone()).collect::<Vec<_>>());
                let mut f = Finding::new(
                    Category::BehaviorOrderMismatch,
                    scope.clone(),
                    format!("order differs: evaluation {} vs extraction {}", show(&expected), show(&actual)),
                );
                f.extraction_refs = member_refs.clone();
                f.evaluation_refs.push(id.clone());
                f.workflow_refs = refs_of(x, actual.iter());
                out.push(f);
            }
            for &i in &d.missing {
                let o = &expected[i];
                if global.contains(&o.canon) {
                    continue;
                }
                let mut f = Finding::new(
                    Category::MissingBehavior,
                    scope.clone(),
                    format!(
                        "{:?} of evaluation state {id} does not occur in {}",
                        o.raw.as_str(),
                        member_refs.join(", ")
                    ),
                );
                f.extraction_refs = member_refs.clone();
                f.evaluation_refs.push(id.clone());
                out.push(f);
            }
            for &i in &d.excess {
                let o = &actual[i];
                let origin = o.origin.as_ref().map(|(r, _)| r.as_str()).unwrap_or("?");
                let mut f = Finding::new(
                    Category::ExcessBehavior,
                    scope.clone(),
                    format!("{:?} at {origin} has no counterpart in evaluation state {id}", o.raw.as_str()),
                );
                f.extraction_refs.push(origin.to_string());
                f.evaluation_refs.push(id.clone());
                f.workflow_refs = refs_of(x, std::iter::once(o));
                out.push(f);
            }
        }
    }
    out
}

fn quoted(labels: &[Label]) -> String {
    let parts: Vec<String> = labels.iter().map(|l| format!("{:?}", l.as_str())).collect();
    format!("[{}]", parts.join(", "))
}

fn refs_of<'a>(x: &ExtractionModel, occ: impl Iterator<Item = &'a Occurrence>) -> Vec<WorkflowRef> {
    let mut out = IndexSet::new();
    for o in occ {
        if let Some((_, e)) = &o.origin {
            out.extend(x.refs(e).cloned());
        }
    }
    out.into_iter().collect()
}

/// The leaves of `m` as a flat machine, each named by its ancestors' names
/// joined with " / ". Transitions between leaves are kept.
pub fn flatten_leaves(m: &StateMachine) -> ExtractionModel {
    fn visit(s: &State, prefix: &str, out: &mut Vec<State>) {
        let name = if prefix.is_empty() { s.name.clone() } else { format!("{prefix} / {}", s.name) };
        if s.is_composite() {
            for c in &s.children {
                visit(c, &name, out);
            }
        } else {
            let mut leaf = State::new(s.id.clone(), name);
            leaf.entry_actions = s.entry_actions.clone();
            leaf.is_final = s.is_final;
            out.push(leaf);
        }
    }
    let mut flat = StateMachine::new(m.name.clone());
    for r in &m.roots {
        visit(r, "", &mut flat.roots);
    }
    // Transitions leaving a composite have no single leaf to carry them and
    // are dropped.
    let leaves: HashSet<String> = flat.roots.iter().map(|s| s.id.clone()).collect();
    flat.transitions = m
        .transitions
        .iter()
        .filter(|t| leaves.contains(&t.source))
        .filter_map(|t| {
            let target = m.state(&t.target)?;
            let mut t = t.clone();
            t.target = landing(target).id.clone();
            Some(t)
        })
        .collect();
    ExtractionModel { machine: flat, provenance: Default::default() }
}

/// Layers of `m` with each leaf classified under the child that contains it.
pub fn identity_classifications(
    m: &StateMachine,
    vocab: &Vocabulary,
) -> Result<Vec<(LayerSpec, Classification)>, crate::ScopeError> {
    let mut scopes = vec![ScopePath::root()];
    for s in m.states() {
        if s.is_composite() {
            if let Some(p) = m.path_of(&s.id) {
                scopes.push(p);
            }
        }
    }
    let mut out = Vec::new();
    if m.roots.is_empty() {
        return Ok(out);
    }
    for scope in scopes {
        let layer = LayerSpec::build(m, &scope, vocab)?;
        let children = m.scope_children(&scope).map_err(crate::ScopeError::NotFound)?;
        let mut assignments = IndexMap::new();
        let mut decided_by = IndexMap::new();
        for c in children {
            let mut sub = Vec::new();
            c.walk(&mut sub);
            for leaf in sub.into_iter().filter(|s| !s.is_composite()) {
                assignments.insert(leaf.id.clone(), Class::State(c.id.clone()));
                decided_by.insert(leaf.id.clone(), Step::Step0);
            }
        }
        out.push((layer, Classification { scope, assignments, decided_by, conflicts: Vec::new() }));
    }
    Ok(out)
}
