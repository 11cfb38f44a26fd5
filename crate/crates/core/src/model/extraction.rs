use std::fmt;

use indexmap::{IndexMap, IndexSet};

use super::{StateMachine, Workflow};

/// An element of an extraction model that carries provenance.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    State(String),
    Transition(usize),
    Entry { state: String, index: usize },
    Event(usize),
    Guard(usize),
    Action { transition: usize, index: usize },
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::State(s) => write!(f, "state {s}"),
            Element::Transition(t) => write!(f, "transition {t}"),
            Element::Entry { state, index } => write!(f, "entry {state} {index}"),
            Element::Event(t) => write!(f, "event {t}"),
            Element::Guard(t) => write!(f, "guard {t}"),
            Element::Action { transition, index } => write!(f, "action {transition} {index}"),
        }
    }
}

/// A workflow node id or an edge index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum WorkflowRef {
    Node(String),
    Edge(usize),
}

impl fmt::Display for WorkflowRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            WorkflowRef::Node(n) => f.write_str(n),
            WorkflowRef::Edge(i) => write!(f, "edge[{i}]"),
        }
    }
}

pub type Provenance = IndexMap<Element, IndexSet<WorkflowRef>>;

/// The flat state machine derived from one workflow partition, with a trace
/// from every element back to the workflow.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtractionModel {
    pub machine: StateMachine,
    pub provenance: Provenance,
}

impl ExtractionModel {
    pub fn refs(&self, element: &Element) -> impl Iterator<Item = &WorkflowRef> {
        self.provenance.get(element).into_iter().flatten()
    }

    /// Workflow refs for a state: its own plus those of its entry actions.
    pub fn state_refs(&self, id: &str) -> IndexSet<WorkflowRef> {
        let mut out: IndexSet<WorkflowRef> = self.refs(&Element::State(id.to_string())).cloned().collect();
        if let Some(s) = self.machine.state(id) {
            for index in 0..s.entry_actions.len() {
                out.extend(self.refs(&Element::Entry { state: id.to_string(), index }).cloned());
            }
        }
        out
    }

    /// Workflow refs for a transition and every label on it.
    pub fn transition_refs(&self, index: usize) -> IndexSet<WorkflowRef> {
        let mut out: IndexSet<WorkflowRef> = self.refs(&Element::Transition(index)).cloned().collect();
        out.extend(self.refs(&Element::Event(index)).cloned());
        out.extend(self.refs(&Element::Guard(index)).cloned());
        if let Some(t) = self.machine.transitions.get(index) {
            for a in 0..t.actions.len() {
                out.extend(self.refs(&Element::Action { transition: index, index: a }).cloned());
            }
        }
        out
    }

    /// Checks flatness and provenance coverage. With a workflow, also checks
    /// that every provenance target exists in it.
    pub fn validate(&self, workflow: Option<&Workflow>) -> Vec<String> {
        let mut out = self.machine.validate();
        let need = |out: &mut Vec<String>, e: Element| {
            if self.provenance.get(&e).is_none_or(|s| s.is_empty()) {
                out.push(format!("{e} has no provenance"));
            }
        };
        for s in &self.machine.roots {
            if !s.children.is_empty() {
                out.push(format!("extracted state {:?} has children", s.id));
            }
            need(&mut out, Element::State(s.id.clone()));
            for index in 0..s.entry_actions.len() {
                need(&mut out, Element::Entry { state: s.id.clone(), index });
            }
        }
        for (i, t) in self.machine.transitions.iter().enumerate() {
            need(&mut out, Element::Transition(i));
            if t.event.is_some() {
                need(&mut out, Element::Event(i));
            }
            if t.guard.is_some() {
                need(&mut out, Element::Guard(i));
            }
            for index in 0..t.actions.len() {
                need(&mut out, Element::Action { transition: i, index });
            }
        }
        if let Some(w) = workflow {
            for (e, refs) in &self.provenance {
                for r in refs {
                    let ok = match r {
                        WorkflowRef::Node(n) => w.node(n).is_some(),
                        WorkflowRef::Edge(i) => *i < w.edges.len(),
                    };
                    if !ok {
                        out.push(format!("{e} traces to missing workflow element {r}"));
                    }
                }
            }
        }
        out
    }
}
