//! Text and JSON rendering of check results.

use std::fmt::Write;

use indexmap::IndexMap;
use serde_json::{json, Map, Value};

use crate::classify::LayerSpec;
use crate::diff::TransitionTable;
use crate::model::{Category, Class, Classification, ExternalTransition, ExtractionModel, Finding, JudgmentList, Step};
use crate::pipeline::RunResults;

/// Renders rows as columns separated by ` | `, each padded to its widest cell.
/// Trailing padding is trimmed.
fn table(rows: &[Vec<String>]) -> String {
    let ncols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let mut widths = vec![0; ncols];
    for row in rows {
        for (i, cell) in row.iter().enumerate() {
            widths[i] = widths[i].max(cell.chars().count());
        }
    }
    let mut out = String::new();
    for row in rows {
        let mut line = String::from("  ");
        for (i, width) in widths.iter().enumerate() {
            let cell = row.get(i).map(String::as_str).unwrap_or("");
            if i > 0 {
                line.push_str(" | ");
            }
            let pad = width - cell.chars().count();
            line.push_str(cell);
            line.extend(std::iter::repeat_n(' ', pad));
        }
        out.push_str(line.trim_end());
        out.push('\n');
    }
    out
}

fn state_label(x: &ExtractionModel, id: &str) -> String {
    x.machine.state(id).map(|s| s.name.clone()).unwrap_or_else(|| id.to_string())
}

/// Classification in the shape of a column-per-class table: the header row
/// holds evaluation state ids plus `unknown`, each column lists the
/// extraction states assigned to it.
pub fn render_classification(c: &Classification, layer: &LayerSpec, x: &ExtractionModel) -> String {
    let mut classes: Vec<Class> = layer.names.keys().map(|k| Class::State(k.clone())).collect();
    classes.push(Class::Unknown);
    let columns: Vec<Vec<String>> =
        classes.iter().map(|cl| c.members(cl).into_iter().map(|s| state_label(x, s)).collect()).collect();
    let depth = columns.iter().map(Vec::len).max().unwrap_or(0);
    let mut rows = vec![classes.iter().map(ToString::to_string).collect::<Vec<_>>()];
    for r in 0..depth {
        rows.push(columns.iter().map(|col| col.get(r).cloned().unwrap_or_default()).collect());
    }
    let mut out = table(&rows);
    let renamed: Vec<String> =
        layer.names.iter().filter(|(id, name)| id != name).map(|(id, name)| format!("{id} = {name:?}")).collect();
    if !renamed.is_empty() {
        out += &format!("  where {}\n", renamed.join(", "));
    }
    let steps: Vec<String> = c.decided_by.iter().map(|(s, step)| format!("{s}:{step}")).collect();
    if !steps.is_empty() {
        out += &format!("  decided by {}\n", steps.join(" "));
    }
    out
}

/// Transition counts per (source, target) class.
pub fn render_transition_table(t: &TransitionTable) -> String {
    let mut classes: Vec<&Class> = Vec::new();
    for (a, b) in t.cells.keys() {
        for c in [a, b] {
            if !classes.contains(&c) {
                classes.push(c);
            }
        }
    }
    let mut rows = vec![std::iter::once("from \\ to".to_string())
        .chain(classes.iter().map(|c| c.to_string()))
        .collect::<Vec<_>>()];
    for a in &classes {
        let mut row = vec![a.to_string()];
        for b in &classes {
            row.push(t.get(a, b).len().to_string());
        }
        rows.push(row);
    }
    table(&rows)
}

pub fn render_judgment(j: &JudgmentList, externals: &[ExternalTransition], warnings: &[Finding]) -> String {
    let mut out = format!("judgment list at {}\n", j.scope);
    for (col, labels) in &j.columns {
        let labels: Vec<&str> = labels.iter().map(|l| l.as_str()).collect();
        let _ = writeln!(out, "  {col}: [{}]", labels.join(", "));
    }
    let dups: Vec<&str> = j.duplicates.iter().map(|l| l.as_str()).collect();
    let _ = writeln!(out, "  duplicates: {{{}}}", dups.join(", "));
    out.push_str("external transitions\n");
    for e in externals {
        let last = e.last_behavior.as_ref().map(|l| l.as_str()).unwrap_or("-");
        let behaviors: Vec<&str> = e.behaviors.iter().map(|l| l.as_str()).collect();
        let _ = writeln!(
            out,
            "  t{} {} -> {}: [{}] last {}",
            e.transition,
            e.source_class,
            e.target_class,
            behaviors.join(", "),
            last
        );
    }
    for w in warnings {
        let _ = writeln!(out, "warning: {}", w.detail);
    }
    out
}

fn render_finding(out: &mut String, f: &Finding) {
    let _ = writeln!(out, "  [{}] {}", f.scope, f.detail);
    if !f.workflow_refs.is_empty() {
        let refs: Vec<String> = f.workflow_refs.iter().map(ToString::to_string).collect();
        let _ = writeln!(out, "    workflow: {}", refs.join(", "));
    }
}

/// Findings grouped by category in category order, then a count line.
pub fn render_findings(findings: &[Finding]) -> String {
    let mut out = String::new();
    for cat in Category::ALL {
        let group: Vec<&Finding> = findings.iter().filter(|f| f.category == cat).collect();
        if group.is_empty() {
            continue;
        }
        let _ = writeln!(out, "{cat} ({})", group.len());
        for f in group {
            render_finding(&mut out, f);
        }
    }
    let n = findings.len();
    let _ = writeln!(out, "{n} finding{}", if n == 1 { "" } else { "s" });
    out
}

pub fn render_text(r: &RunResults) -> String {
    let mut out = format!("workflow {} / partition {} / evaluation {}\n", r.workflow, r.partition, r.evaluation);
    for layer in &r.layers {
        let _ = writeln!(out, "\n== layer {} ==", layer.classification.scope);
        out.push_str("classification\n");
        out.push_str(&render_classification(&layer.classification, &layer.spec, &r.extraction));
        out.push_str("extraction transitions\n");
        out.push_str(&render_transition_table(&layer.extraction_table));
        out.push_str("evaluation transitions\n");
        out.push_str(&render_transition_table(&layer.evaluation_table));
    }
    out.push_str("\n== findings ==\n");
    out.push_str(&render_findings(&r.findings));
    out
}

/// Category histogram in category order, nonzero entries only.
pub fn summary(findings: &[Finding]) -> IndexMap<Category, usize> {
    let mut out = IndexMap::new();
    for cat in Category::ALL {
        let n = findings.iter().filter(|f| f.category == cat).count();
        if n > 0 {
            out.insert(cat, n);
        }
    }
    out
}

fn classification_json(c: &Classification) -> (Value, Value) {
    let mut classes = Map::new();
    let mut steps = Map::new();
    for (s, class) in &c.assignments {
        classes.insert(s.clone(), Value::String(class.to_string()));
        let step = c.decided_by.get(s).copied().unwrap_or(Step::Unresolved);
        steps.insert(s.clone(), Value::String(step.to_string()));
    }
    (Value::Object(classes), Value::Object(steps))
}

fn finding_json(f: &Finding) -> Value {
    json!({
        "category": f.category.name(),
        "scope": f.scope.to_string(),
        "detail": f.detail,
        "extraction_refs": f.extraction_refs,
        "evaluation_refs": f.evaluation_refs,
        "workflow_refs": f.workflow_refs.iter().map(ToString::to_string).collect::<Vec<_>>(),
    })
}

/// The run as one JSON document with a fixed key order.
pub fn render_structured(r: &RunResults) -> String {
    let layers: Vec<Value> = r
        .layers
        .iter()
        .map(|l| {
            let (classification, decided_by) = classification_json(&l.classification);
            json!({
                "scope": l.classification.scope.to_string(),
                "classification": classification,
                "decided_by": decided_by,
            })
        })
        .collect();
    let mut sum = Map::new();
    for (cat, n) in summary(&r.findings) {
        sum.insert(cat.name().to_string(), json!(n));
    }
    let doc = json!({
        "version": 1,
        "workflow": r.workflow,
        "partition": r.partition,
        "evaluation": r.evaluation,
        "layers": layers,
        "findings": r.findings.iter().map(finding_json).collect::<Vec<_>>(),
        "summary": Value::Object(sum),
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("json values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{ScopePath, WorkflowRef};
    use crate::text::{parse_statemachine, parse_workflow};

    fn identical() -> RunResults {
        let w = parse_workflow(
            "workflow W\nprecondition \"idle\"\npostcondition \"done\"\nnode i initial\nnode u update \"prepare\"\n\
             node f final\nedge i -> u\nedge u -> f\n",
        )
        .unwrap();
        let m = parse_statemachine(
            "statemachine M\nstate a \"idle\" {\nentry \"prepare\"\n}\nstate b \"done\" {\nfinal\n}\ntransition a -> b\n",
        )
        .unwrap();
        crate::pipeline::check(&w, "main", &m, &Default::default()).unwrap()
    }

    #[test]
    fn table_alignment() {
        let t = table(&[vec!["s0".into(), "unknown".into()], vec!["Precondition : aaa".into(), String::new()]]);
        assert_eq!(t, "  s0                 | unknown\n  Precondition : aaa |\n");
    }

    #[test]
    fn zero_findings() {
        let r = identical();
        assert!(r.findings.is_empty(), "{:?}", r.findings);
        assert!(render_text(&r).ends_with("0 findings\n"));
        let v: Value = serde_json::from_str(&render_structured(&r)).unwrap();
        assert_eq!(v["summary"], json!({}));
        assert_eq!(v["findings"], json!([]));
        let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
        assert_eq!(keys, ["version", "workflow", "partition", "evaluation", "layers", "findings", "summary"]);
    }

    #[test]
    fn provenance_line() {
        let mut f =
            Finding::new(Category::ExcessState, ScopePath::root(), "extraction state s9 matches no evaluation state");
        f.workflow_refs = vec![WorkflowRef::Node("n4".into()), WorkflowRef::Node("n5".into())];
        let text = render_findings(&[f]);
        assert!(text.contains("s9"));
        assert!(text.contains("workflow: n4, n5"));
        assert!(text.ends_with("1 finding\n"));
    }
}
