//! Layer-by-layer assignment of extraction states to evaluation states.

use std::collections::{HashMap, HashSet, VecDeque};

use indexmap::{IndexMap, IndexSet};

use crate::error::ScopeError;
use crate::judgment::{build_judgment_list, find_external_transitions};
use crate::model::{
    Category, Class, Classification, ExternalTransition, ExtractionModel, Finding, JudgmentList, Label, ScopePath,
    StateMachine, Step, Transition, Vocabulary,
};

/// Everything the classifier needs to know about one evaluation layer.
#[derive(Debug, Clone)]
pub struct LayerSpec {
    pub judgment: JudgmentList,
    pub externals: Vec<ExternalTransition>,
    /// Direct children of the scope: id to display name.
    pub names: IndexMap<String, String>,
}

impl LayerSpec {
    pub fn build(m: &StateMachine, scope: &ScopePath, vocab: &Vocabulary) -> Result<LayerSpec, ScopeError> {
        let judgment = build_judgment_list(m, scope, vocab)?;
        let externals = find_external_transitions(m, scope, vocab)?;
        let names = m
            .scope_children(scope)
            .map_err(ScopeError::NotFound)?
            .iter()
            .map(|s| (s.id.clone(), s.name.clone()))
            .collect();
        Ok(LayerSpec { judgment, externals, names })
    }

    pub fn scope(&self) -> &ScopePath {
        &self.judgment.scope
    }

    /// Canonical last behaviors of the layer's external transitions.
    pub fn forbidden(&self) -> IndexSet<Label> {
        self.externals.iter().filter_map(|e| e.last_behavior.clone()).collect()
    }
}

fn squash(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Evaluation states whose name occurs in `name`.
pub fn names_contained_in<'a>(name: &str, layer: &'a LayerSpec) -> Vec<&'a str> {
    let hay = squash(name);
    layer
        .names
        .iter()
        .filter(|(_, n)| {
            let n = squash(n);
            !n.is_empty() && hay.contains(&n)
        })
        .map(|(id, _)| id.as_str())
        .collect()
}

/// Transitions of the extraction whose endpoints are both candidates.
fn sub_transitions<'x>(x: &'x ExtractionModel, candidates: &HashSet<&str>) -> Vec<(usize, &'x Transition)> {
    x.machine
        .transitions
        .iter()
        .enumerate()
        .filter(|(_, t)| candidates.contains(t.source.as_str()) && candidates.contains(t.target.as_str()))
        .collect()
}

fn canon(labels: Vec<&Label>, vocab: &Vocabulary) -> Vec<Label> {
    labels.into_iter().map(|l| vocab.canonicalize(l)).collect()
}

/// Columns of the layer holding any of `labels`, ignoring duplicates.
fn matching_columns<'a>(labels: &[Label], j: &'a JudgmentList) -> IndexSet<&'a str> {
    let wanted: Vec<&Label> = labels.iter().filter(|l| !j.duplicates.contains(*l)).collect();
    j.columns.iter().filter(|(_, col)| col.iter().any(|l| wanted.contains(&l))).map(|(k, _)| k.as_str()).collect()
}

struct Run<'a> {
    scope: &'a ScopePath,
    x: &'a ExtractionModel,
    classes: IndexMap<String, Class>,
    steps: IndexMap<String, Step>,
    conflicts: Vec<Finding>,
}

impl Run<'_> {
    fn assign(&mut self, s: &str, class: &str, step: Step) {
        self.classes.insert(s.to_string(), Class::State(class.to_string()));
        self.steps.insert(s.to_string(), step);
    }

    fn conflict(&mut self, s: &str, step: Step, classes: impl IntoIterator<Item = impl ToString>, why: &str) {
        let classes: Vec<String> = classes.into_iter().map(|c| c.to_string()).collect();
        let mut f = Finding::new(
            Category::ClassificationConflict,
            self.scope.clone(),
            format!("{s}: {step} {why}: {}", classes.join(", ")),
        );
        f.extraction_refs.push(s.to_string());
        f.evaluation_refs = classes;
        f.workflow_refs = self.x.state_refs(s).into_iter().collect();
        self.conflicts.push(f);
    }

    fn unknown(&self) -> Vec<String> {
        self.classes.iter().filter(|(_, c)| **c == Class::Unknown).map(|(s, _)| s.clone()).collect()
    }

    /// Adopts a single class, records a conflict for several.
    fn decide(&mut self, s: &str, step: Step, found: &IndexSet<&str>, why: &str) {
        match found.len() {
            0 => {}
            1 => self.assign(s, found[0], step),
            _ => self.conflict(s, step, found.iter(), why),
        }
    }
}

/// Outcome of the backward search from one unclassified state.
#[derive(Debug, Default, PartialEq, Eq)]
pub(crate) struct Trace {
    /// Classes of classified states reached.
    pub reached: IndexSet<String>,
    /// Transitions (extraction indices) skipped because they carry a
    /// forbidden behavior.
    pub blocked: IndexSet<usize>,
}

fn carries_forbidden(t: &Transition, forbidden: &IndexSet<Label>, vocab: &Vocabulary) -> bool {
    t.behaviors().into_iter().any(|l| forbidden.contains(&vocab.canonicalize(l)))
}

fn backward_bfs(
    start: &str,
    sub: &[(usize, &Transition)],
    known: &HashMap<&str, &str>,
    forbidden: &IndexSet<Label>,
    vocab: &Vocabulary,
) -> Trace {
    let mut trace = Trace::default();
    let mut seen = HashSet::from([start.to_string()]);
    let mut queue = VecDeque::from([start.to_string()]);
    while let Some(u) = queue.pop_front() {
        for (i, t) in sub.iter().filter(|(_, t)| t.target == u) {
            if carries_forbidden(t, forbidden, vocab) {
                trace.blocked.insert(*i);
                continue;
            }
            match known.get(t.source.as_str()) {
                Some(c) => {
                    trace.reached.insert(c.to_string());
                }
                None => {
                    if seen.insert(t.source.clone()) {
                        queue.push_back(t.source.clone());
                    }
                }
            }
        }
    }
    trace
}

/// When nothing classified is reachable, the blocked transitions say which
/// external transition the state sits behind: adopt that transition's target.
fn fallback_classes(
    trace: &Trace,
    x: &ExtractionModel,
    known: &HashMap<&str, &str>,
    layer: &LayerSpec,
    vocab: &Vocabulary,
) -> IndexSet<String> {
    let mut out = IndexSet::new();
    for &i in &trace.blocked {
        let t = &x.machine.transitions[i];
        let labels = canon(t.behaviors(), vocab);
        let src_class = known.get(t.source.as_str());
        for e in &layer.externals {
            let Some(last) = &e.last_behavior else { continue };
            if !labels.contains(last) {
                continue;
            }
            if src_class.is_some_and(|c| *c != e.source_class) {
                continue;
            }
            out.insert(e.target_class.clone());
        }
    }
    out
}

/// Classifies `candidates` (extraction state ids) against one layer.
pub fn classify_layer(
    x: &ExtractionModel,
    candidates: &[&str],
    layer: &LayerSpec,
    vocab: &Vocabulary,
) -> Classification {
    let j = &layer.judgment;
    let mut run = Run {
        scope: &j.scope,
        x,
        classes: candidates.iter().map(|s| (s.to_string(), Class::Unknown)).collect(),
        steps: candidates.iter().map(|s| (s.to_string(), Step::Unresolved)).collect(),
        conflicts: Vec::new(),
    };
    let cand_set: HashSet<&str> = candidates.iter().copied().collect();
    let sub = sub_transitions(x, &cand_set);

    // Step 0: names.
    for s in candidates {
        let Some(state) = x.machine.state(s) else { continue };
        let found: IndexSet<&str> = names_contained_in(&state.name, layer).into_iter().collect();
        run.decide(s, Step::Step0, &found, "name contains several evaluation names");
    }

    // Step 1: entry actions.
    for s in run.unknown() {
        let Some(state) = x.machine.state(&s) else { continue };
        let labels: Vec<Label> = state.entry_actions.iter().map(|l| vocab.canonicalize(l)).collect();
        let found = matching_columns(&labels, j);
        run.decide(&s, Step::Step1, &found, "entry actions match several columns");
    }

    // Step 2: outgoing transitions inside the sub-machine.
    for s in run.unknown() {
        let mut labels = Vec::new();
        for (_, t) in sub.iter().filter(|(_, t)| t.source == s) {
            labels.extend(canon(t.behaviors(), vocab));
        }
        let found = matching_columns(&labels, j);
        run.decide(&s, Step::Step2, &found, "outgoing behaviors match several columns");
    }

    // Step 3: backward reachability against the Step 0-2 result.
    let snapshot = run.classes.clone();
    let known: HashMap<&str, &str> =
        snapshot.iter().filter_map(|(s, c)| c.as_state().map(|c| (s.as_str(), c))).collect();
    let forbidden = layer.forbidden();
    for s in run.unknown() {
        let trace = backward_bfs(&s, &sub, &known, &forbidden, vocab);
        let found =
            if trace.reached.is_empty() { fallback_classes(&trace, x, &known, layer, vocab) } else { trace.reached };
        let found: IndexSet<&str> = found.iter().map(String::as_str).collect();
        run.decide(&s, Step::Step3, &found, "reaches several classified states");
    }

    Classification { scope: j.scope.clone(), assignments: run.classes, decided_by: run.steps, conflicts: run.conflicts }
}

/// The classification as it stood before Step 3.
pub fn before_step3(c: &Classification) -> Classification {
    let mut out = c.clone();
    for (s, step) in out.decided_by.iter_mut() {
        if *step == Step::Step3 {
            *step = Step::Unresolved;
            out.assignments.insert(s.clone(), Class::Unknown);
        }
    }
    out
}

/// One classification per layer of the evaluation model, top-down in
/// pre-order. A composite evaluation state's layer classifies the
/// extraction states assigned to it one layer up.
pub fn classify_all_layers(
    x: &ExtractionModel,
    m: &StateMachine,
    vocab: &Vocabulary,
) -> Result<Vec<(LayerSpec, Classification)>, ScopeError> {
    let mut out = Vec::new();
    if m.roots.is_empty() {
        return Ok(out);
    }
    let all: Vec<&str> = x.machine.states().into_iter().map(|s| s.id.as_str()).collect();
    descend(x, m, vocab, ScopePath::root(), &all, &mut out)?;
    Ok(out)
}

fn descend(
    x: &ExtractionModel,
    m: &StateMachine,
    vocab: &Vocabulary,
    scope: ScopePath,
    candidates: &[&str],
    out: &mut Vec<(LayerSpec, Classification)>,
) -> Result<(), ScopeError> {
    let layer = LayerSpec::build(m, &scope, vocab)?;
    let c = classify_layer(x, candidates, &layer, vocab);
    let children: Vec<(String, bool)> = m
        .scope_children(&scope)
        .map_err(ScopeError::NotFound)?
        .iter()
        .map(|s| (s.id.clone(), s.is_composite()))
        .collect();
    let members: HashMap<String, Vec<String>> = children
        .iter()
        .map(|(id, _)| {
            let ms = c.members(&Class::State(id.clone())).into_iter().map(String::from).collect();
            (id.clone(), ms)
        })
        .collect();
    out.push((layer, c));
    for (id, composite) in children {
        if composite {
            let sub: Vec<&str> = members[&id].iter().map(String::as_str).collect();
            descend(x, m, vocab, scope.child(&id), &sub, out)?;
        }
    }
    Ok(())
}
