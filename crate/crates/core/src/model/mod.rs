//! Shared domain types: workflows, state machines, labels, and analysis
//! results.

mod analysis;
mod extraction;
mod label;
mod machine;
mod workflow;

pub use analysis::{transition_ref, Category, Class, Classification, ExternalTransition, Finding, JudgmentList, Step};
pub use extraction::{Element, ExtractionModel, Provenance, WorkflowRef};
pub use label::{normalize_label, Label, Vocabulary};
pub use machine::{ScopePath, State, StateMachine, Transition};
pub use workflow::{Edge, NodeKind, Workflow, WorkflowNode, DEFAULT_PARTITION};
