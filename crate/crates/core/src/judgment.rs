//! Per-layer judgment lists and external transitions of an evaluation model.

use std::collections::HashMap;

use indexmap::{IndexMap, IndexSet};

use crate::error::ScopeError;
use crate::model::{
    transition_ref, Category, ExternalTransition, Finding, JudgmentList, Label, ScopePath, State, StateMachine,
    Vocabulary,
};

fn scope_states<'m>(m: &'m StateMachine, scope: &ScopePath) -> Result<&'m [State], ScopeError> {
    let children = m.scope_children(scope).map_err(ScopeError::NotFound)?;
    if children.is_empty() {
        return Err(ScopeError::NoChildren(scope.to_string()));
    }
    Ok(children)
}

/// Maps every state under the scope to the direct child of the scope that
/// contains it.
pub fn child_index(children: &[State]) -> HashMap<&str, &str> {
    let mut out = HashMap::new();
    for c in children {
        for id in c.descendant_ids() {
            out.insert(id, c.id.as_str());
        }
    }
    out
}

/// Builds one column per direct child of `scope`: entry actions of the child
/// and its descendants plus the behaviors of every transition sourced inside
/// it, in pre-order (each state's entries, then its outgoing transitions in
/// declaration order). Labels are canonicalized.
pub fn build_judgment_list(
    m: &StateMachine,
    scope: &ScopePath,
    vocab: &Vocabulary,
) -> Result<JudgmentList, ScopeError> {
    let children = scope_states(m, scope)?;
    let mut columns = IndexMap::new();
    for c in children {
        let mut subtree = Vec::new();
        c.walk(&mut subtree);
        let mut col = Vec::new();
        for s in subtree {
            col.extend(s.entry_actions.iter().map(|l| vocab.canonicalize(l)));
            for t in m.transitions.iter().filter(|t| t.source == s.id) {
                col.extend(t.behaviors().into_iter().map(|l| vocab.canonicalize(l)));
            }
        }
        columns.insert(c.id.clone(), col);
    }
    let duplicates = duplicates_of(&columns);
    Ok(JudgmentList { scope: scope.clone(), columns, duplicates })
}

fn duplicates_of(columns: &IndexMap<String, Vec<Label>>) -> IndexSet<Label> {
    let mut seen: IndexMap<&Label, IndexSet<&str>> = IndexMap::new();
    for (col, labels) in columns {
        for l in labels {
            seen.entry(l).or_default().insert(col.as_str());
        }
    }
    seen.into_iter().filter(|(_, cols)| cols.len() >= 2).map(|(l, _)| l.clone()).collect()
}

/// Transitions between two different direct children of `scope`.
pub fn find_external_transitions(
    m: &StateMachine,
    scope: &ScopePath,
    vocab: &Vocabulary,
) -> Result<Vec<ExternalTransition>, ScopeError> {
    let children = scope_states(m, scope)?;
    let owner = child_index(children);
    let mut out = Vec::new();
    for (i, t) in m.transitions.iter().enumerate() {
        let (Some(src), Some(dst)) = (owner.get(t.source.as_str()), owner.get(t.target.as_str())) else {
            continue;
        };
        if src == dst {
            continue;
        }
        let behaviors: Vec<Label> = t.behaviors().into_iter().map(|l| vocab.canonicalize(l)).collect();
        out.push(ExternalTransition {
            source_class: src.to_string(),
            target_class: dst.to_string(),
            last_behavior: behaviors.last().cloned(),
            behaviors,
            transition: i,
        });
    }
    Ok(out)
}

/// Transitions that enter or leave the scope's subtree (one end inside a
/// child of the scope, the other outside all of them).
pub fn boundary_warnings(m: &StateMachine, scope: &ScopePath) -> Result<Vec<Finding>, ScopeError> {
    let children = scope_states(m, scope)?;
    let owner = child_index(children);
    let mut out = Vec::new();
    for (i, t) in m.transitions.iter().enumerate() {
        let src = owner.get(t.source.as_str());
        let dst = owner.get(t.target.as_str());
        let detail = match (src, dst) {
            (Some(s), None) => format!(
                "evaluation transition {} leaves scope {scope} from {s}; its behaviors are counted in {s}",
                transition_ref(i)
            ),
            (None, Some(d)) => format!("evaluation transition {} enters scope {scope} at {d}", transition_ref(i)),
            _ => continue,
        };
        if scope.is_root() {
            continue;
        }
        let mut f = Finding::new(Category::StructuralWarning, scope.clone(), detail);
        f.evaluation_refs.push(transition_ref(i));
        out.push(f);
    }
    Ok(out)
}
