//! The full check: extract, classify every layer, diff.

use crate::classify::{classify_all_layers, LayerSpec};
use crate::diff::{
    build_evaluation_table, build_extraction_table, diff_behaviors, diff_states, diff_transitions, flatten_leaves,
    identity_classifications, TransitionTable,
};
use crate::error::CheckError;
use crate::extract::extract;
use crate::model::{
    Category, Classification, ExtractionModel, Finding, ScopePath, StateMachine, Vocabulary, Workflow, WorkflowRef,
};
use crate::text::{validate_workflow, Severity};

#[derive(Debug, Clone)]
pub struct LayerResult {
    pub spec: LayerSpec,
    pub classification: Classification,
    pub extraction_table: TransitionTable,
    pub evaluation_table: TransitionTable,
}

#[derive(Debug, Clone)]
pub struct RunResults {
    pub workflow: String,
    pub partition: String,
    pub evaluation: String,
    pub extraction: ExtractionModel,
    pub layers: Vec<LayerResult>,
    pub findings: Vec<Finding>,
}

/// Diffs an already classified extraction model against `m`. Findings come
/// per layer (conflicts, states, transitions), then the
/// behavior comparison.
pub fn compare(
    x: &ExtractionModel,
    classified: Vec<(LayerSpec, Classification)>,
    m: &StateMachine,
    vocab: &Vocabulary,
) -> Result<(Vec<LayerResult>, Vec<Finding>), CheckError> {
    let mut findings = Vec::new();
    let mut layers = Vec::new();
    for (spec, c) in &classified {
        findings.extend(c.conflicts.iter().cloned());
        findings.extend(diff_states(c, spec, x));
        let tx = build_extraction_table(x, c, spec);
        let te = build_evaluation_table(m, spec.scope());
        findings.extend(diff_transitions(&tx, &te, x, m, vocab));
        layers.push(LayerResult {
            spec: spec.clone(),
            classification: c.clone(),
            extraction_table: tx,
            evaluation_table: te,
        });
    }
    findings.extend(diff_behaviors(&classified, x, m, vocab));
    Ok((layers, findings))
}

pub fn check(w: &Workflow, partition: &str, m: &StateMachine, vocab: &Vocabulary) -> Result<RunResults, CheckError> {
    let problems = m.validate();
    if !problems.is_empty() {
        return Err(CheckError::Evaluation(problems.join("; ")));
    }
    let x = extract(w, partition)?;
    let classified = classify_all_layers(&x, m, vocab)?;
    let (layers, mut findings) = compare(&x, classified, m, vocab)?;
    for d in validate_workflow(w, partition) {
        if d.severity == Severity::Warning {
            let mut f = Finding::new(Category::StructuralWarning, ScopePath::root(), d.message);
            f.workflow_refs = d.nodes.into_iter().map(WorkflowRef::Node).collect();
            findings.push(f);
        }
    }
    Ok(RunResults {
        workflow: w.name.clone(),
        partition: partition.to_string(),
        evaluation: m.name.clone(),
        extraction: x,
        layers,
        findings,
    })
}

/// Diffs `m` against its own leaves under the identity classification.
pub fn self_diff(m: &StateMachine, vocab: &Vocabulary) -> Result<Vec<Finding>, CheckError> {
    let x = flatten_leaves(m);
    let classified = identity_classifications(m, vocab)?;
    Ok(compare(&x, classified, m, vocab)?.1)
}
