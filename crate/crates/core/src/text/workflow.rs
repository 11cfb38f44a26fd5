use std::collections::HashMap;

use super::lexer::{quote, tokenize, Cursor, Tok, Token};
use crate::error::ParseError;
use crate::model::{Edge, Label, NodeKind, Workflow, WorkflowNode, DEFAULT_PARTITION};

fn label_at(text: &str, tok: &Token) -> Result<Label, ParseError> {
    Label::new(text).map_err(|e| ParseError::new(tok.line, tok.column, e.to_string()))
}

fn parse_kind(cur: &mut Cursor) -> Result<NodeKind, ParseError> {
    let (kw, kw_tok) = cur.ident()?;
    let labelled = |cur: &mut Cursor| -> Result<Label, ParseError> {
        let (s, t) = cur.string()?;
        label_at(&s, &t)
    };
    Ok(match kw.as_str() {
        "initial" => NodeKind::Initial,
        "final" => NodeKind::Final,
        "decision" => NodeKind::Decision,
        "merge" => NodeKind::Merge,
        "action" => NodeKind::PlainAction(labelled(cur)?),
        "timer" => NodeKind::Timer(labelled(cur)?),
        "update" => NodeKind::Update(labelled(cur)?),
        "send" => {
            let label = labelled(cur)?;
            let peer = if cur.eat_keyword("to") { Some(cur.ident()?.0) } else { None };
            NodeKind::SignalSend { label, peer }
        }
        "receive" => {
            let label = labelled(cur)?;
            let peer = if cur.eat_keyword("from") { Some(cur.ident()?.0) } else { None };
            NodeKind::SignalReceive { label, peer }
        }
        "fork" | "join" => {
            return Err(ParseError::new(kw_tok.line, kw_tok.column, format!("`{kw}` nodes are not supported")))
        }
        other => return Err(ParseError::new(kw_tok.line, kw_tok.column, format!("unknown node kind `{other}`"))),
    })
}

/// Parses the line-oriented workflow format.
pub fn parse_workflow(source: &str) -> Result<Workflow, ParseError> {
    let mut cur = Cursor::new(tokenize(source)?);
    let mut wf: Option<Workflow> = None;
    let mut node_at: HashMap<String, (usize, usize)> = HashMap::new();
    let mut edge_at = Vec::new();

    loop {
        cur.skip_newlines();
        if cur.peek().tok == Tok::Eof {
            break;
        }
        let (kw, kw_tok) = cur.ident()?;
        if kw != "workflow" && wf.is_none() {
            return Err(ParseError::new(kw_tok.line, kw_tok.column, "expected `workflow NAME` header"));
        }
        match kw.as_str() {
            "workflow" => {
                if wf.is_some() {
                    return Err(ParseError::new(kw_tok.line, kw_tok.column, "duplicate `workflow` header"));
                }
                wf = Some(Workflow::new(cur.ident()?.0));
            }
            "precondition" | "postcondition" => {
                let (text, _) = cur.string()?;
                let w = wf.as_mut().expect("header checked");
                let slot = if kw == "precondition" { &mut w.precondition } else { &mut w.postcondition };
                if slot.is_some() {
                    return Err(ParseError::new(kw_tok.line, kw_tok.column, format!("duplicate `{kw}`")));
                }
                *slot = Some(text);
            }
            "node" => {
                let (id, id_tok) = cur.ident()?;
                let kind = parse_kind(&mut cur)?;
                let partition = if cur.eat_keyword("in") { cur.ident()?.0 } else { DEFAULT_PARTITION.to_string() };
                if node_at.contains_key(&id) {
                    return Err(ParseError::new(id_tok.line, id_tok.column, format!("duplicate node id `{id}`")));
                }
                node_at.insert(id.clone(), (id_tok.line, id_tok.column));
                wf.as_mut().expect("header checked").nodes.push(WorkflowNode { id, kind, partition });
            }
            "edge" => {
                let (from, from_tok) = cur.ident()?;
                cur.expect(&Tok::Arrow)?;
                let (to, to_tok) = cur.ident()?;
                let guard = if cur.eat(&Tok::LBracket) {
                    if !cur.eat_keyword("guard") {
                        return Err(cur.unexpected("`guard`"));
                    }
                    let (s, t) = cur.string()?;
                    cur.expect(&Tok::RBracket)?;
                    Some(label_at(&s, &t)?)
                } else {
                    None
                };
                edge_at.push([(from.clone(), from_tok), (to.clone(), to_tok)]);
                wf.as_mut().expect("header checked").edges.push(Edge { from, to, guard });
            }
            other => {
                return Err(ParseError::new(kw_tok.line, kw_tok.column, format!("unknown statement `{other}`")));
            }
        }
        cur.end_line()?;
    }

    let wf = wf.ok_or_else(|| ParseError::new(1, 1, "expected `workflow NAME` header"))?;
    for ends in &edge_at {
        for (id, tok) in ends {
            if !node_at.contains_key(id) {
                return Err(ParseError::new(tok.line, tok.column, format!("edge references unknown node `{id}`")));
            }
        }
    }
    Ok(wf)
}

/// Canonical text: one statement per line in declaration order, LF endings.
pub fn serialize_workflow(w: &Workflow) -> String {
    let mut out = format!("workflow {}\n", w.name);
    if let Some(p) = &w.precondition {
        out += &format!("precondition {}\n", quote(p));
    }
    if let Some(p) = &w.postcondition {
        out += &format!("postcondition {}\n", quote(p));
    }
    for n in &w.nodes {
        let kind = match &n.kind {
            NodeKind::Initial | NodeKind::Final | NodeKind::Decision | NodeKind::Merge => n.kind.keyword().to_string(),
            NodeKind::PlainAction(l) | NodeKind::Timer(l) | NodeKind::Update(l) => {
                format!("{} {}", n.kind.keyword(), quote(l.as_str()))
            }
            NodeKind::SignalSend { label, peer } => match peer {
                Some(p) => format!("send {} to {p}", quote(label.as_str())),
                None => format!("send {}", quote(label.as_str())),
            },
            NodeKind::SignalReceive { label, peer } => match peer {
                Some(p) => format!("receive {} from {p}", quote(label.as_str())),
                None => format!("receive {}", quote(label.as_str())),
            },
        };
        out += &format!("node {} {kind}", n.id);
        if n.partition != DEFAULT_PARTITION {
            out += &format!(" in {}", n.partition);
        }
        out.push('\n');
    }
    for e in &w.edges {
        out += &format!("edge {} -> {}", e.from, e.to);
        if let Some(g) = &e.guard {
            out += &format!(" [guard {}]", quote(g.as_str()));
        }
        out.push('\n');
    }
    out
}
