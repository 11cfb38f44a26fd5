//! Text formats: workflow (`.wf`), state machine (`.sm`) and vocabulary
//! (`.vocab`) files, plus structural validation of workflows.

mod lexer;
mod statemachine;
mod validate;
mod vocab;
mod workflow;

pub use statemachine::{parse_statemachine, serialize_extraction, serialize_statemachine, write_transition};
pub use validate::{validate_workflow, Diagnostic, Severity};
pub use vocab::{parse_vocabulary, serialize_vocabulary};
pub use workflow::{parse_workflow, serialize_workflow};
