use std::collections::{HashSet, VecDeque};
use std::fmt;

use crate::model::{Label, NodeKind, Workflow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub severity: Severity,
    pub message: String,
    pub nodes: Vec<String>,
}

impl Diagnostic {
    fn error(message: impl Into<String>, nodes: Vec<String>) -> Self {
        Diagnostic { severity: Severity::Error, message: message.into(), nodes }
    }

    fn warning(message: impl Into<String>, nodes: Vec<String>) -> Self {
        Diagnostic { severity: Severity::Warning, message: message.into(), nodes }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}: {}", self.message)
    }
}

/// Structural checks that extraction relies on, for one partition.
/// Problems are returned as data; nothing here fails.
pub fn validate_workflow(w: &Workflow, partition: &str) -> Vec<Diagnostic> {
    let mut out: Vec<Diagnostic> = w.validate().into_iter().map(|m| Diagnostic::error(m, vec![])).collect();

    if !w.has_partition(partition) {
        out.push(Diagnostic::error(format!("no partition named {partition:?}"), vec![]));
        return out;
    }
    let in_part = |id: &str| w.node(id).is_some_and(|n| n.partition == partition);

    let initials: Vec<String> = w
        .nodes
        .iter()
        .filter(|n| n.partition == partition && n.kind == NodeKind::Initial)
        .map(|n| n.id.clone())
        .collect();
    match initials.len() {
        0 => out.push(Diagnostic::error(format!("partition {partition:?} has no initial node"), vec![])),
        1 => {
            let start = initials[0].as_str();
            let mut seen = HashSet::from([start]);
            let mut queue = VecDeque::from([start]);
            let mut final_reached = false;
            while let Some(id) = queue.pop_front() {
                if w.node(id).is_some_and(|n| n.kind == NodeKind::Final) {
                    final_reached = true;
                }
                for (_, e) in w.outgoing(id) {
                    if in_part(&e.to) && seen.insert(e.to.as_str()) {
                        queue.push_back(e.to.as_str());
                    }
                }
            }
            if !final_reached {
                out.push(Diagnostic::error(
                    format!("no final node reachable from initial node {start:?} within partition {partition:?}"),
                    vec![start.to_string()],
                ));
            }
        }
        _ => out.push(Diagnostic::error(
            format!("partition {partition:?} has {} initial nodes", initials.len()),
            initials.clone(),
        )),
    }

    for (i, e) in w.edges.iter().enumerate() {
        let (from_in, to_in) = (in_part(&e.from), in_part(&e.to));
        if !from_in && !to_in {
            continue;
        }
        if from_in != to_in {
            out.push(Diagnostic::warning(
                format!("edge {i} ({} -> {}) crosses partitions and is ignored by extraction", e.from, e.to),
                vec![e.from.clone(), e.to.clone()],
            ));
        }
        if e.guard.is_some() && from_in && w.node(&e.from).is_some_and(|n| n.kind != NodeKind::Decision) {
            out.push(Diagnostic::error(
                format!("edge {i} carries a guard but {:?} is not a decision node", e.from),
                vec![e.from.clone()],
            ));
        }
    }

    for n in w.nodes.iter().filter(|n| n.partition == partition) {
        if n.kind != NodeKind::Decision {
            continue;
        }
        let outs: Vec<_> = w.outgoing(&n.id).collect();
        if outs.len() < 2 {
            out.push(Diagnostic::error(
                format!("decision {:?} has {} outgoing edge(s); at least 2 required", n.id, outs.len()),
                vec![n.id.clone()],
            ));
        }
        if outs.iter().filter(|(_, e)| e.guard.is_none()).count() > 1 {
            out.push(Diagnostic::error(
                format!("decision {:?} has more than one unguarded branch", n.id),
                vec![n.id.clone()],
            ));
        }
    }

    for n in w.nodes.iter().filter(|n| n.partition == partition) {
        let outs = w.outgoing(&n.id).filter(|(_, e)| in_part(&e.to)).count();
        match n.kind {
            NodeKind::Decision | NodeKind::Final => {}
            _ if outs > 1 => out.push(Diagnostic::error(
                format!("{:?} has {outs} outgoing edges but is not a decision node", n.id),
                vec![n.id.clone()],
            )),
            _ if outs == 0 => out.push(Diagnostic::error(
                format!("{:?} has no outgoing edge and is not a final node", n.id),
                vec![n.id.clone()],
            )),
            _ => {}
        }
    }
    if initials.len() == 1 {
        let mut seen = HashSet::from([initials[0].as_str()]);
        let mut queue = VecDeque::from([initials[0].as_str()]);
        while let Some(id) = queue.pop_front() {
            for (_, e) in w.outgoing(id) {
                if in_part(&e.to) && seen.insert(e.to.as_str()) {
                    queue.push_back(e.to.as_str());
                }
            }
        }
        for n in w.nodes.iter().filter(|n| n.partition == partition && !seen.contains(n.id.as_str())) {
            out.push(Diagnostic::warning(
                format!("{:?} is unreachable from the initial node", n.id),
                vec![n.id.clone()],
            ));
        }
    }

    let labels_elsewhere = |want_send: bool| -> HashSet<&Label> {
        w.nodes
            .iter()
            .filter(|n| n.partition != partition)
            .filter_map(|n| match (&n.kind, want_send) {
                (NodeKind::SignalSend { label, .. }, true) => Some(label),
                (NodeKind::SignalReceive { label, .. }, false) => Some(label),
                _ => None,
            })
            .collect()
    };
    let sends_elsewhere = labels_elsewhere(true);
    let receives_elsewhere = labels_elsewhere(false);
    for n in w.nodes.iter().filter(|n| n.partition == partition) {
        match &n.kind {
            NodeKind::SignalSend { label, .. } if !receives_elsewhere.contains(label) => {
                out.push(Diagnostic::warning(
                    format!("send {:?} at {:?} has no matching receive in another partition", label.as_str(), n.id),
                    vec![n.id.clone()],
                ));
            }
            NodeKind::SignalReceive { label, .. } if !sends_elsewhere.contains(label) => {
                out.push(Diagnostic::warning(
                    format!("receive {:?} at {:?} has no matching send in another partition", label.as_str(), n.id),
                    vec![n.id.clone()],
                ));
            }
            _ => {}
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::text::parse_workflow;

    fn check(src: &str, part: &str) -> Vec<Diagnostic> {
        validate_workflow(&parse_workflow(src).unwrap(), part)
    }

    #[test]
    fn two_initials() {
        let d = check("workflow W\nnode a initial\nnode b initial\nnode f final\nedge a -> f\nedge b -> f\n", "main");
        assert!(d.iter().any(|d| d.is_error() && d.message.contains("2 initial")));
    }

    #[test]
    fn unmatched_send_warns() {
        let d = check(
            "workflow W\nnode a initial\nnode s send \"report\"\nnode f final\nedge a -> s\nedge s -> f\n",
            "main",
        );
        assert_eq!(d.len(), 1);
        assert_eq!(d[0].severity, Severity::Warning);
        assert!(d[0].message.contains("report"));

        let d = check(
            "workflow W\nnode a initial\nnode s send \"report\"\nnode f final\nedge a -> s\nedge s -> f\n\
             node b initial in P\nnode r receive \"report\" in P\nnode g final in P\nedge b -> r\nedge r -> g\n",
            "main",
        );
        assert!(d.is_empty(), "{d:?}");
    }

    #[test]
    fn decision_problems() {
        let d = check(
            "workflow W\nnode a initial\nnode d decision\nnode x action \"x\"\nnode f final\n\
             edge a -> x [guard \"g\"]\nedge x -> d\nedge d -> f\n",
            "main",
        );
        assert!(d.iter().any(|d| d.message.contains("not a decision")));
        assert!(d.iter().any(|d| d.message.contains("at least 2")));
    }

    #[test]
    fn unreachable_final_and_cross_edges() {
        let d = check(
            "workflow W\nnode a initial\nnode m merge\nnode f final\nnode q final in P\nedge a -> m\nedge m -> q\n",
            "main",
        );
        assert!(d.iter().any(|d| d.is_error() && d.message.contains("no final node reachable")));
        assert!(d.iter().any(|d| !d.is_error() && d.message.contains("crosses partitions")));
    }

    #[test]
    fn branching_and_dead_ends() {
        let d = check(
            "workflow W\nnode a initial\nnode x action \"x\"\nnode y action \"y\"\nnode f final\n\
             edge a -> x\nedge a -> f\nedge x -> y\n",
            "main",
        );
        assert!(d.iter().any(|d| d.is_error() && d.message.contains("not a decision node")));
        assert!(d.iter().any(|d| d.is_error() && d.message.contains("not a final node")));
    }

    #[test]
    fn unreachable_node_warns() {
        let d =
            check("workflow W\nnode a initial\nnode f final\nnode z action \"z\"\nedge a -> f\nedge z -> f\n", "main");
        assert!(d.iter().any(|d| !d.is_error() && d.message.contains("unreachable")));
    }

    #[test]
    fn unknown_partition() {
        let d = check("workflow W\nnode a initial\n", "Nowhere");
        assert!(d[0].message.contains("Nowhere"));
    }
}
