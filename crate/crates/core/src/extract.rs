//! Conversion of one workflow partition into a flat state machine.
//!
//! The walk starts at the partition's initial node and carries a *current
//! state* plus an optional *pending transition* (event, guard, actions):
//!
//! - plain actions accumulate on the pending transition;
//! - signal receipts and timers commit any pending transition and open a new
//!   one triggered by their label;
//! - signal sends and updates commit any pending transition and become entry
//!   actions of the current state;
//! - decisions commit, then walk each branch depth-first with a pending
//!   transition carrying the branch guard;
//! - merges (and any node with several incoming edges) are materialized as
//!   shared states, which is where cycles close;
//! - final nodes commit into a final state.
//!
//! Every committed target state is memoized by the node that forced the
//! commit, so revisits connect to the existing state instead of re-walking.

use std::collections::{HashMap, HashSet};

use indexmap::IndexSet;

use crate::error::ExtractError;
use crate::model::{
    Element, ExtractionModel, Label, NodeKind, Provenance, State, StateMachine, Transition, Workflow, WorkflowNode,
    WorkflowRef,
};
use crate::text::validate_workflow;

pub const PRECONDITION_PREFIX: &str = "Precondition : ";
pub const POSTCONDITION_PREFIX: &str = "Postcondition : ";

#[derive(Debug, Clone, Default)]
struct Pending {
    event: Option<(Label, String)>,
    guard: Option<(Label, usize)>,
    actions: Vec<(Label, String)>,
    refs: IndexSet<WorkflowRef>,
}

struct Builder<'a> {
    nodes: HashMap<&'a str, &'a WorkflowNode>,
    out_edges: HashMap<&'a str, Vec<usize>>,
    anchors: HashSet<&'a str>,
    workflow: &'a Workflow,
    memo: HashMap<&'a str, usize>,
    states: Vec<State>,
    transitions: Vec<Transition>,
    provenance: Provenance,
    next_id: usize,
}

impl<'a> Builder<'a> {
    fn new(w: &'a Workflow, partition: &str) -> Self {
        let nodes: HashMap<&str, &WorkflowNode> =
            w.nodes.iter().filter(|n| n.partition == partition).map(|n| (n.id.as_str(), n)).collect();
        let mut out_edges: HashMap<&str, Vec<usize>> = HashMap::new();
        let mut in_degree: HashMap<&str, usize> = HashMap::new();
        for (i, e) in w.edges.iter().enumerate() {
            if nodes.contains_key(e.from.as_str()) && nodes.contains_key(e.to.as_str()) {
                out_edges.entry(e.from.as_str()).or_default().push(i);
                *in_degree.entry(e.to.as_str()).or_default() += 1;
            }
        }
        let anchors = nodes
            .values()
            .filter(|n| {
                let deg = in_degree.get(n.id.as_str()).copied().unwrap_or(0);
                match n.kind {
                    NodeKind::Merge => true,
                    NodeKind::Initial => deg >= 1,
                    _ => deg >= 2,
                }
            })
            .map(|n| n.id.as_str())
            .collect();
        Builder {
            nodes,
            out_edges,
            anchors,
            workflow: w,
            memo: HashMap::new(),
            states: Vec::new(),
            transitions: Vec::new(),
            provenance: Provenance::new(),
            next_id: 1,
        }
    }

    fn trace(&mut self, element: Element, r: WorkflowRef) {
        self.provenance.entry(element).or_default().insert(r);
    }

    fn push_state(&mut self, id: String, name: String, origin: &str) -> usize {
        self.trace(Element::State(id.clone()), WorkflowRef::Node(origin.to_string()));
        self.states.push(State::new(id, name));
        self.states.len() - 1
    }

    fn synth_state(&mut self, origin: &'a str) -> usize {
        let id = format!("s{}", self.next_id);
        self.next_id += 1;
        let idx = self.push_state(id.clone(), id, origin);
        self.memo.insert(origin, idx);
        idx
    }

    fn final_state(&mut self, origin: &'a str) -> usize {
        let id = format!("s{}", self.next_id);
        self.next_id += 1;
        let name = match &self.workflow.postcondition {
            Some(p) => format!("{POSTCONDITION_PREFIX}{p}"),
            None => id.clone(),
        };
        let idx = self.push_state(id, name, origin);
        self.states[idx].is_final = true;
        self.memo.insert(origin, idx);
        idx
    }

    fn add_entry(&mut self, state: usize, label: &Label, node: &str) {
        let s = &mut self.states[state];
        let index = s.entry_actions.len();
        s.entry_actions.push(label.clone());
        let id = s.id.clone();
        self.trace(Element::Entry { state: id, index }, WorkflowRef::Node(node.to_string()));
    }

    /// Adds the transition `from -> to`. With no pending transition this is
    /// an unconditional transition, omitted when it would be an empty self-loop.
    fn connect(&mut self, from: usize, pending: Option<Pending>, to: usize, at: &str, via: Option<usize>) {
        let p = match pending {
            Some(p) => p,
            None if from == to => return,
            None => Pending::default(),
        };
        let idx = self.transitions.len();
        let mut t = Transition::new(self.states[from].id.clone(), self.states[to].id.clone());
        let mut refs = p.refs.clone();
        if let Some(e) = via {
            refs.insert(WorkflowRef::Edge(e));
        }
        refs.insert(WorkflowRef::Node(at.to_string()));
        for r in refs {
            self.trace(Element::Transition(idx), r);
        }
        if let Some((l, node)) = p.event {
            self.trace(Element::Event(idx), WorkflowRef::Node(node));
            t.event = Some(l);
        }
        if let Some((l, edge)) = p.guard {
            self.trace(Element::Guard(idx), WorkflowRef::Edge(edge));
            t.guard = Some(l);
        }
        for (index, (l, node)) in p.actions.into_iter().enumerate() {
            self.trace(Element::Action { transition: idx, index }, WorkflowRef::Node(node));
            t.actions.push(l);
        }
        self.transitions.push(t);
    }

    /// Commits an open pending transition into a fresh state keyed by `node`
    /// and returns the new current state.
    fn commit_here(
        &mut self,
        current: usize,
        pending: &mut Option<Pending>,
        node: &'a str,
        via: Option<usize>,
    ) -> usize {
        match pending.take() {
            Some(p) => {
                let s = self.synth_state(node);
                self.connect(current, Some(p), s, node, via);
                s
            }
            None => current,
        }
    }

    fn visit(
        &mut self,
        node: &'a str,
        via: Option<usize>,
        mut current: usize,
        mut pending: Option<Pending>,
    ) -> Result<(), ExtractError> {
        if let (Some(e), Some(p)) = (via, pending.as_mut()) {
            p.refs.insert(WorkflowRef::Edge(e));
        }
        if let Some(&target) = self.memo.get(node) {
            self.connect(current, pending, target, node, via);
            return Ok(());
        }
        let n = self.nodes[node];
        if n.kind == NodeKind::Final {
            let s = self.final_state(node);
            self.connect(current, pending, s, node, via);
            return Ok(());
        }
        if self.anchors.contains(node) {
            current = self.commit_here(current, &mut pending, node, via);
            let id = self.states[current].id.clone();
            self.trace(Element::State(id), WorkflowRef::Node(node.to_string()));
            self.memo.insert(node, current);
        }

        match &n.kind {
            NodeKind::PlainAction(l) => {
                let p = pending.get_or_insert_with(Pending::default);
                p.actions.push((l.clone(), node.to_string()));
                p.refs.insert(WorkflowRef::Node(node.to_string()));
            }
            NodeKind::SignalReceive { label, .. } | NodeKind::Timer(label) => {
                current = self.commit_here(current, &mut pending, node, via);
                let mut p = Pending { event: Some((label.clone(), node.to_string())), ..Pending::default() };
                p.refs.insert(WorkflowRef::Node(node.to_string()));
                pending = Some(p);
            }
            NodeKind::SignalSend { label, .. } | NodeKind::Update(label) => {
                current = self.commit_here(current, &mut pending, node, via);
                self.add_entry(current, label, node);
            }
            NodeKind::Decision => {
                current = self.commit_here(current, &mut pending, node, via);
                let outs = self.out_edges.get(node).cloned().unwrap_or_default();
                if outs.iter().filter(|&&e| self.workflow.edges[e].guard.is_none()).count() > 1 {
                    return Err(ExtractError::Unsupported {
                        node: node.to_string(),
                        reason: "decision has more than one unguarded branch".into(),
                    });
                }
                for e in outs {
                    let edge = &self.workflow.edges[e];
                    let mut p = Pending { guard: edge.guard.clone().map(|g| (g, e)), ..Pending::default() };
                    p.refs.insert(WorkflowRef::Node(node.to_string()));
                    self.visit(edge.to.as_str(), Some(e), current, Some(p))?;
                }
                return Ok(());
            }
            NodeKind::Merge | NodeKind::Initial => {}
            NodeKind::Final => unreachable!("handled above"),
        }

        let outs = self.out_edges.get(node).cloned().unwrap_or_default();
        match outs.as_slice() {
            [] => Err(ExtractError::Unsupported {
                node: node.to_string(),
                reason: "control flow stops at a node that is not final".into(),
            }),
            [e] => {
                let to = self.workflow.edges[*e].to.as_str();
                self.visit(to, Some(*e), current, pending)
            }
            _ => Err(ExtractError::Unsupported {
                node: node.to_string(),
                reason: "only decision nodes may have several outgoing edges".into(),
            }),
        }
    }
}

/// Extracts the flat state machine for `partition`.
pub fn extract(w: &Workflow, partition: &str) -> Result<ExtractionModel, ExtractError> {
    if !w.has_partition(partition) {
        return Err(ExtractError::UnknownPartition(partition.to_string()));
    }
    let errors: Vec<String> =
        validate_workflow(w, partition).into_iter().filter(|d| d.is_error()).map(|d| d.message).collect();
    if !errors.is_empty() {
        return Err(ExtractError::Invalid { partition: partition.to_string(), problems: errors.join("; ") });
    }

    let mut b = Builder::new(w, partition);
    let initial = w
        .nodes
        .iter()
        .find(|n| n.partition == partition && n.kind == NodeKind::Initial)
        .expect("validated: exactly one initial node");
    let start_name = match &w.precondition {
        Some(p) => format!("{PRECONDITION_PREFIX}{p}"),
        None => "s0".to_string(),
    };
    let start = b.push_state("s0".into(), start_name, &initial.id);
    b.states[start].is_initial_in_parent = true;
    b.memo.insert(initial.id.as_str(), start);
    b.visit_successors(initial.id.as_str(), start)?;

    let machine =
        StateMachine { name: format!("{}_{}", w.name, partition), roots: b.states, transitions: b.transitions };
    Ok(ExtractionModel { machine, provenance: b.provenance })
}

impl<'a> Builder<'a> {
    fn visit_successors(&mut self, node: &'a str, current: usize) -> Result<(), ExtractError> {
        let outs = self.out_edges.get(node).cloned().unwrap_or_default();
        match outs.as_slice() {
            [e] => {
                let to = self.workflow.edges[*e].to.as_str();
                self.visit(to, Some(*e), current, None)
            }
            _ => Err(ExtractError::Unsupported {
                node: node.to_string(),
                reason: format!("initial node needs exactly one outgoing edge, found {}", outs.len()),
            }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_workflow;

    fn wf(body: &str) -> Workflow {
        parse_workflow(&format!("workflow W\n{body}")).unwrap()
    }

    #[test]
    fn pre_to_post() {
        let w = wf("precondition \"aaa\"\npostcondition \"zzz\"\nnode i initial\nnode f final\nedge i -> f\n");
        let x = extract(&w, "main").unwrap();
        let names: Vec<_> = x.machine.roots.iter().map(|s| s.name.as_str()).collect();
        assert_eq!(names, ["Precondition : aaa", "Postcondition : zzz"]);
        assert_eq!(x.machine.transitions.len(), 1);
        assert!(x.machine.transitions[0].is_unconditional());
        assert!(x.machine.roots[1].is_final);
        assert!(x.validate(Some(&w)).is_empty());
    }

    #[test]
    fn receive_then_update() {
        let w = wf("node i initial\nnode r receive \"E0\"\nnode u update \"A0\"\nnode f final\nedge i -> r\nedge r -> u\nedge u -> f\n");
        let x = extract(&w, "main").unwrap();
        let m = &x.machine;
        assert_eq!(m.roots.len(), 3);
        let t = &m.transitions[0];
        assert_eq!(t.event.as_ref().unwrap().as_str(), "E0");
        assert_eq!(t.target, "s1");
        assert_eq!(m.roots[1].entry_actions[0].as_str(), "A0");
        assert!(x.validate(Some(&w)).is_empty());
        assert_eq!(x.refs(&Element::Event(0)).collect::<Vec<_>>(), vec![&WorkflowRef::Node("r".into())]);
    }

    #[test]
    fn plain_actions_share_one_arrow() {
        let w = wf("node i initial\nnode a action \"a\"\nnode b action \"b\"\nnode f final\nedge i -> a\nedge a -> b\nedge b -> f\n");
        let x = extract(&w, "main").unwrap();
        assert_eq!(x.machine.transitions.len(), 1);
        assert_eq!(x.machine.transitions[0].actions.len(), 2);
    }

    #[test]
    fn event_during_open_transition_forces_state() {
        let w = wf("node i initial\nnode a action \"a\"\nnode r receive \"E\"\nnode f final\nedge i -> a\nedge a -> r\nedge r -> f\n");
        let m = extract(&w, "main").unwrap().machine;
        assert_eq!(m.roots.len(), 3);
        assert_eq!(m.transitions[0].actions[0].as_str(), "a");
        assert_eq!(m.transitions[1].event.as_ref().unwrap().as_str(), "E");
    }

    #[test]
    fn loop_through_merge_terminates() {
        let w = wf("node i initial\nnode m merge\nnode r receive \"tick\"\nnode d decision\nnode f final\n\
                    edge i -> m\nedge m -> r\nedge r -> d\nedge d -> m [guard \"again\"]\nedge d -> f [guard \"done\"]\n");
        let x = extract(&w, "main").unwrap();
        let m = &x.machine;
        // s0 (start, also the merge point) -tick-> s1 (decision) -[again]-> s0, -[done]-> s2
        assert_eq!(m.roots.len(), 3);
        let edges: Vec<_> = m.transitions.iter().map(|t| (t.source.as_str(), t.target.as_str())).collect();
        assert_eq!(edges, [("s0", "s1"), ("s1", "s0"), ("s1", "s2")]);
        assert!(x.validate(Some(&w)).is_empty());
    }

    #[test]
    fn errors_name_the_problem() {
        let w = wf("node i initial\nnode f final\nedge i -> f\n");
        assert_eq!(extract(&w, "Nowhere"), Err(ExtractError::UnknownPartition("Nowhere".into())));
        let w =
            wf("node i initial\nnode d decision\nnode a final\nnode b final\nedge i -> d\nedge d -> a\nedge d -> b\n");
        match extract(&w, "main") {
            Err(ExtractError::Invalid { problems, .. }) => assert!(problems.contains("\"d\"")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn deterministic() {
        let w = wf("node i initial\nnode d decision\nnode a update \"a\"\nnode b send \"b\"\nnode f final\n\
                    edge i -> d\nedge d -> a [guard \"x\"]\nedge d -> b [guard \"y\"]\nedge a -> f\nedge b -> f\n");
        assert_eq!(extract(&w, "main").unwrap(), extract(&w, "main").unwrap());
    }
}
