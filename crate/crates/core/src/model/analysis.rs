use std::collections::{HashMap, HashSet};
use std::fmt;

use indexmap::{IndexMap, IndexSet};
use serde::Serialize;

use super::{Label, ScopePath, WorkflowRef};

/// Behavior labels per evaluation state for one layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JudgmentList {
    pub scope: ScopePath,
    pub columns: IndexMap<String, Vec<Label>>,
    pub duplicates: IndexSet<Label>,
}

impl JudgmentList {
    /// Columns containing `label`, in column order.
    pub fn columns_of<'a>(&'a self, label: &'a Label) -> impl Iterator<Item = &'a str> + 'a {
        self.columns.iter().filter(move |(_, v)| v.contains(label)).map(|(k, _)| k.as_str())
    }

    pub fn validate(&self) -> Vec<String> {
        let mut seen: HashMap<&Label, HashSet<&str>> = HashMap::new();
        for (col, labels) in &self.columns {
            for l in labels {
                seen.entry(l).or_default().insert(col);
            }
        }
        let expected: HashSet<&Label> = seen.iter().filter(|(_, c)| c.len() >= 2).map(|(l, _)| *l).collect();
        let actual: HashSet<&Label> = self.duplicates.iter().collect();
        if expected == actual {
            Vec::new()
        } else {
            vec!["duplicate set does not match cross-column occurrences".to_string()]
        }
    }
}

/// An evaluation transition between two sibling states of a layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExternalTransition {
    pub source_class: String,
    pub target_class: String,
    /// Event, guard, then actions; canonicalized.
    pub behaviors: Vec<Label>,
    pub last_behavior: Option<Label>,
    /// Index into the evaluation machine's transition list.
    pub transition: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Class {
    State(String),
    Unknown,
}

impl Class {
    pub fn as_state(&self) -> Option<&str> {
        match self {
            Class::State(s) => Some(s),
            Class::Unknown => None,
        }
    }
}

impl fmt::Display for Class {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Class::State(s) => f.write_str(s),
            Class::Unknown => f.write_str("unknown"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Step {
    Step0,
    Step1,
    Step2,
    Step3,
    Unresolved,
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Step::Step0 => "Step0",
            Step::Step1 => "Step1",
            Step::Step2 => "Step2",
            Step::Step3 => "Step3",
            Step::Unresolved => "Unresolved",
        };
        f.write_str(s)
    }
}

/// Assignment of extraction states to the evaluation states of one layer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Classification {
    pub scope: ScopePath,
    pub assignments: IndexMap<String, Class>,
    pub decided_by: IndexMap<String, Step>,
    /// ClassificationConflict findings raised while classifying.
    pub conflicts: Vec<Finding>,
}

impl Classification {
    pub fn members(&self, class: &Class) -> Vec<&str> {
        self.assignments.iter().filter(|(_, c)| *c == class).map(|(s, _)| s.as_str()).collect()
    }

    pub fn class_of(&self, state: &str) -> Option<&Class> {
        self.assignments.get(state)
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (s, c) in &self.assignments {
            match self.decided_by.get(s) {
                None => out.push(format!("{s} has no deciding step")),
                Some(step) => {
                    if (*step == Step::Unresolved) != (*c == Class::Unknown) {
                        out.push(format!("{s}: step {step} inconsistent with class {c}"));
                    }
                }
            }
        }
        if self.decided_by.len() != self.assignments.len() {
            out.push("decided_by and assignments cover different states".to_string());
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Category {
    ExcessState,
    MissingState,
    StateNameUnmatched,
    ClassificationConflict,
    TransitionCountMismatch,
    TransitionBehaviorMismatch,
    BehaviorWordingMismatch,
    BehaviorOrderMismatch,
    MissingBehavior,
    ExcessBehavior,
    GlobalBehaviorMissing,
    StructuralWarning,
}

impl Category {
    pub const ALL: [Category; 12] = [
        Category::ExcessState,
        Category::MissingState,
        Category::StateNameUnmatched,
        Category::ClassificationConflict,
        Category::TransitionCountMismatch,
        Category::TransitionBehaviorMismatch,
        Category::BehaviorWordingMismatch,
        Category::BehaviorOrderMismatch,
        Category::MissingBehavior,
        Category::ExcessBehavior,
        Category::GlobalBehaviorMissing,
        Category::StructuralWarning,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::ExcessState => "ExcessState",
            Category::MissingState => "MissingState",
            Category::StateNameUnmatched => "StateNameUnmatched",
            Category::ClassificationConflict => "ClassificationConflict",
            Category::TransitionCountMismatch => "TransitionCountMismatch",
            Category::TransitionBehaviorMismatch => "TransitionBehaviorMismatch",
            Category::BehaviorWordingMismatch => "BehaviorWordingMismatch",
            Category::BehaviorOrderMismatch => "BehaviorOrderMismatch",
            Category::MissingBehavior => "MissingBehavior",
            Category::ExcessBehavior => "ExcessBehavior",
            Category::GlobalBehaviorMissing => "GlobalBehaviorMissing",
            Category::StructuralWarning => "StructuralWarning",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One reported inconsistency.
///
/// Extraction refs name extraction states (`s3`) or transitions (`t4`);
/// evaluation refs likewise for the evaluation machine.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    pub category: Category,
    pub scope: ScopePath,
    pub detail: String,
    pub extraction_refs: Vec<String>,
    pub evaluation_refs: Vec<String>,
    pub workflow_refs: Vec<WorkflowRef>,
    /// Transition-table cell (source class, target class) for transition findings.
    pub cell: Option<(Class, Class)>,
}

impl Finding {
    pub fn new(category: Category, scope: ScopePath, detail: impl Into<String>) -> Self {
        Finding {
            category,
            scope,
            detail: detail.into(),
            extraction_refs: Vec::new(),
            evaluation_refs: Vec::new(),
            workflow_refs: Vec::new(),
            cell: None,
        }
    }
}

pub fn transition_ref(index: usize) -> String {
    format!("t{index}")
}
