//! Cross-validation of workflow models against hierarchical evaluation state
//! machines.
//!
//! The pipeline is: parse the workflow and the evaluation machine
//! ([`text`]), extract a flat state machine from one workflow partition
//! ([`extract`]), build per-layer judgment lists ([`judgment`]), classify the
//! extracted states layer by layer ([`classify`]), then diff the two models
//! ([`diff`]) and render the results ([`report`]).

pub mod classify;
pub mod diff;
pub mod error;
pub mod extract;
pub mod judgment;
pub mod model;
pub mod pipeline;
pub mod report;
pub mod text;

pub use error::{CheckError, ExtractError, ModelError, ParseError, ScopeError};
