use std::collections::HashSet;

use super::Label;

pub const DEFAULT_PARTITION: &str = "main";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum NodeKind {
    Initial,
    Final,
    Decision,
    Merge,
    PlainAction(Label),
    SignalSend { label: Label, peer: Option<String> },
    SignalReceive { label: Label, peer: Option<String> },
    Timer(Label),
    Update(Label),
}

impl NodeKind {
    pub fn label(&self) -> Option<&Label> {
        match self {
            NodeKind::PlainAction(l) | NodeKind::Timer(l) | NodeKind::Update(l) => Some(l),
            NodeKind::SignalSend { label, .. } | NodeKind::SignalReceive { label, .. } => Some(label),
            _ => None,
        }
    }

    pub fn keyword(&self) -> &'static str {
        match self {
            NodeKind::Initial => "initial",
            NodeKind::Final => "final",
            NodeKind::Decision => "decision",
            NodeKind::Merge => "merge",
            NodeKind::PlainAction(_) => "action",
            NodeKind::SignalSend { .. } => "send",
            NodeKind::SignalReceive { .. } => "receive",
            NodeKind::Timer(_) => "timer",
            NodeKind::Update(_) => "update",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WorkflowNode {
    pub id: String,
    pub kind: NodeKind,
    pub partition: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: String,
    pub to: String,
    pub guard: Option<Label>,
}

/// An activity-style workflow: typed nodes in swimlane partitions joined by
/// control edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Workflow {
    pub name: String,
    pub precondition: Option<String>,
    pub postcondition: Option<String>,
    pub nodes: Vec<WorkflowNode>,
    pub edges: Vec<Edge>,
}

impl Workflow {
    pub fn new(name: impl Into<String>) -> Self {
        Workflow { name: name.into(), precondition: None, postcondition: None, nodes: Vec::new(), edges: Vec::new() }
    }

    pub fn node(&self, id: &str) -> Option<&WorkflowNode> {
        self.nodes.iter().find(|n| n.id == id)
    }

    /// Partition names in order of first appearance.
    pub fn partitions(&self) -> Vec<&str> {
        let mut seen = HashSet::new();
        self.nodes.iter().map(|n| n.partition.as_str()).filter(|p| seen.insert(*p)).collect()
    }

    pub fn has_partition(&self, partition: &str) -> bool {
        self.nodes.iter().any(|n| n.partition == partition)
    }

    /// Indices of edges leaving `id`, in declaration order.
    pub fn outgoing(&self, id: &str) -> impl Iterator<Item = (usize, &Edge)> {
        let id = id.to_string();
        self.edges.iter().enumerate().filter(move |(_, e)| e.from == id)
    }

    /// Checks id uniqueness, edge endpoints, and guard placement.
    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut ids = HashSet::new();
        for n in &self.nodes {
            if !ids.insert(n.id.as_str()) {
                out.push(format!("duplicate node id {:?}", n.id));
            }
        }
        for (i, e) in self.edges.iter().enumerate() {
            for end in [&e.from, &e.to] {
                if !ids.contains(end.as_str()) {
                    out.push(format!("edge {i} references unknown node {end:?}"));
                }
            }
            if e.guard.is_some() {
                if let Some(src) = self.node(&e.from) {
                    if src.kind != NodeKind::Decision {
                        out.push(format!("edge {i} carries a guard but {:?} is not a decision", e.from));
                    }
                }
            }
        }
        out
    }
}
