use std::collections::HashMap;

use super::lexer::{quote, tokenize, Cursor, Tok, Token};
use crate::error::ParseError;
use crate::model::{ExtractionModel, Label, State, StateMachine, Transition};

struct Located<T> {
    value: T,
    tok: Token,
}

#[derive(Default)]
struct Ctx {
    state_at: HashMap<String, Token>,
    transitions: Vec<Located<Transition>>,
}

fn label_at(text: &str, tok: &Token) -> Result<Label, ParseError> {
    Label::new(text).map_err(|e| ParseError::new(tok.line, tok.column, e.to_string()))
}

fn parse_transition(cur: &mut Cursor) -> Result<Located<Transition>, ParseError> {
    let (source, tok) = cur.ident()?;
    cur.expect(&Tok::Arrow)?;
    let (target, _) = cur.ident()?;
    let mut t = Transition::new(source, target);
    if cur.eat_keyword("on") {
        let (s, st) = cur.string()?;
        t.event = Some(label_at(&s, &st)?);
    }
    if cur.eat(&Tok::LBracket) {
        let (s, st) = cur.string()?;
        t.guard = Some(label_at(&s, &st)?);
        cur.expect(&Tok::RBracket)?;
    }
    if cur.eat(&Tok::Slash) {
        loop {
            let (s, st) = cur.string()?;
            t.actions.push(label_at(&s, &st)?);
            if !cur.eat(&Tok::Comma) {
                break;
            }
        }
    }
    Ok(Located { value: t, tok })
}

/// What one `{ ... }` body (or the top level) declared.
struct Block {
    states: Vec<State>,
    initial: Option<Located<String>>,
    is_final: bool,
    entries: Vec<Label>,
}

/// Parses statements until `}` (inside a state) or end of input (top level).
fn parse_block(cur: &mut Cursor, ctx: &mut Ctx, nested: bool) -> Result<Block, ParseError> {
    let mut states = Vec::new();
    let mut initial: Option<Located<String>> = None;
    let mut is_final = false;
    let mut entries = Vec::new();
    loop {
        cur.skip_newlines();
        match &cur.peek().tok {
            Tok::Eof if nested => return Err(cur.unexpected("`}`")),
            Tok::Eof => break,
            Tok::RBrace if nested => {
                cur.next();
                break;
            }
            _ => {}
        }
        let (kw, kw_tok) = cur.ident()?;
        match kw.as_str() {
            "state" => {
                let (id, id_tok) = cur.ident()?;
                let name = match &cur.peek().tok {
                    Tok::Str(_) => cur.string()?.0,
                    _ => id.clone(),
                };
                if ctx.state_at.contains_key(&id) {
                    return Err(ParseError::new(id_tok.line, id_tok.column, format!("duplicate state id `{id}`")));
                }
                ctx.state_at.insert(id.clone(), id_tok);
                let mut st = State::new(id, name);
                if cur.eat(&Tok::LBrace) {
                    let Block { states: children, initial: child_init, is_final: fin, entries: ents } =
                        parse_block(cur, ctx, true)?;
                    st.children = children;
                    st.is_final = fin;
                    st.entry_actions = ents;
                    if let Some(init) = child_init {
                        mark_initial(&mut st.children, &init)?;
                    }
                }
                states.push(st);
            }
            "transition" => {
                let t = parse_transition(cur)?;
                ctx.transitions.push(t);
            }
            "initial" => {
                let (id, tok) = cur.ident()?;
                if initial.is_some() {
                    return Err(ParseError::new(kw_tok.line, kw_tok.column, "duplicate `initial` in this block"));
                }
                initial = Some(Located { value: id, tok });
            }
            "entry" if nested => {
                let (s, t) = cur.string()?;
                entries.push(label_at(&s, &t)?);
            }
            "final" if nested => is_final = true,
            "statemachine" => {
                return Err(ParseError::new(kw_tok.line, kw_tok.column, "duplicate `statemachine` header"));
            }
            other => {
                return Err(ParseError::new(kw_tok.line, kw_tok.column, format!("unexpected `{other}`")));
            }
        }
        // Statements end at a newline, `}` or end of input.
        match cur.peek().tok {
            Tok::Newline | Tok::RBrace | Tok::Eof => {}
            _ => return Err(cur.unexpected("end of statement")),
        }
    }
    Ok(Block { states, initial, is_final, entries })
}

fn mark_initial(states: &mut [State], init: &Located<String>) -> Result<(), ParseError> {
    match states.iter_mut().find(|s| s.id == init.value) {
        Some(s) => {
            s.is_initial_in_parent = true;
            Ok(())
        }
        None => Err(ParseError::new(
            init.tok.line,
            init.tok.column,
            format!("initial state `{}` is not declared in this block", init.value),
        )),
    }
}

/// Parses the block-structured state-machine format.
pub fn parse_statemachine(source: &str) -> Result<StateMachine, ParseError> {
    let mut cur = Cursor::new(tokenize(source)?);
    cur.skip_newlines();
    if !cur.eat_keyword("statemachine") {
        return Err(cur.unexpected("`statemachine NAME` header"));
    }
    let (name, _) = cur.ident()?;
    cur.end_line()?;
    let mut ctx = Ctx::default();
    let Block { states: roots, initial: init, .. } = parse_block(&mut cur, &mut ctx, false)?;
    let mut m = StateMachine::new(name);
    m.roots = roots;
    if let Some(init) = init {
        mark_initial(&mut m.roots, &init)?;
    }
    for t in ctx.transitions {
        for end in [&t.value.source, &t.value.target] {
            if !ctx.state_at.contains_key(end) {
                return Err(ParseError::new(
                    t.tok.line,
                    t.tok.column,
                    format!("transition references undeclared state `{end}`"),
                ));
            }
        }
        m.transitions.push(t.value);
    }
    Ok(m)
}

fn write_state(out: &mut String, s: &State, depth: usize) {
    let pad = "  ".repeat(depth);
    out.push_str(&format!("{pad}state {} {}", s.id, quote(&s.name)));
    let empty = s.entry_actions.is_empty() && s.children.is_empty() && !s.is_final;
    if empty {
        out.push_str(" {}\n");
        return;
    }
    out.push_str(" {\n");
    let inner = "  ".repeat(depth + 1);
    for e in &s.entry_actions {
        out.push_str(&format!("{inner}entry {}\n", quote(e.as_str())));
    }
    if s.is_final {
        out.push_str(&format!("{inner}final\n"));
    }
    if let Some(init) = s.children.iter().find(|c| c.is_initial_in_parent) {
        out.push_str(&format!("{inner}initial {}\n", init.id));
    }
    for c in &s.children {
        write_state(out, c, depth + 1);
    }
    out.push_str(&format!("{pad}}}\n"));
}

pub fn write_transition(t: &Transition) -> String {
    let mut line = format!("transition {} -> {}", t.source, t.target);
    if let Some(e) = &t.event {
        line += &format!(" on {}", quote(e.as_str()));
    }
    if let Some(g) = &t.guard {
        line += &format!(" [{}]", quote(g.as_str()));
    }
    if !t.actions.is_empty() {
        let acts: Vec<String> = t.actions.iter().map(|a| quote(a.as_str())).collect();
        line += &format!(" / {}", acts.join(", "));
    }
    line
}

/// Canonical text for a state machine.
pub fn serialize_statemachine(m: &StateMachine) -> String {
    let mut out = format!("statemachine {}\n", m.name);
    if let Some(init) = m.roots.iter().find(|s| s.is_initial_in_parent) {
        out.push_str(&format!("initial {}\n", init.id));
    }
    for s in &m.roots {
        write_state(&mut out, s, 0);
    }
    for t in &m.transitions {
        out.push_str(&write_transition(t));
        out.push('\n');
    }
    out
}

/// Serializes an extraction model with its provenance as trailing comments:
/// `# prov state s3 <- n7,n8`.
pub fn serialize_extraction(x: &ExtractionModel) -> String {
    let mut out = serialize_statemachine(&x.machine);
    for (element, refs) in &x.provenance {
        let refs: Vec<String> = refs.iter().map(ToString::to_string).collect();
        out.push_str(&format!("# prov {element} <- {}\n", refs.join(",")));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_machine() {
        let m = parse_statemachine("statemachine M\nstate s0 \"waiting\" { entry \"action0\" }\n").unwrap();
        assert_eq!(m.roots.len(), 1);
        assert_eq!(m.roots[0].name, "waiting");
        assert_eq!(m.roots[0].entry_actions[0].as_str(), "action0");
    }

    #[test]
    fn nested_transition() {
        let src = r#"statemachine M
state s1 {
  initial s5
  state s5 {}
  state s8 { final }
}
transition s5 -> s8 on "E0" ["G"] / "a", "b"
"#;
        let m = parse_statemachine(src).unwrap();
        assert_eq!(m.roots[0].children.len(), 2);
        assert!(m.roots[0].children[0].is_initial_in_parent);
        assert!(m.roots[0].children[1].is_final);
        let t = &m.transitions[0];
        assert_eq!((t.source.as_str(), t.target.as_str()), ("s5", "s8"));
        assert_eq!(t.event.as_ref().unwrap().as_str(), "E0");
        assert_eq!(t.guard.as_ref().unwrap().as_str(), "G");
        assert_eq!(t.actions.len(), 2);
        assert_eq!(parse_statemachine(&serialize_statemachine(&m)).unwrap(), m);
    }

    #[test]
    fn dangling_transition_names_state() {
        let e = parse_statemachine("statemachine M\nstate s0 {}\ntransition s0 -> sX\n").unwrap_err();
        assert!(e.message.contains("sX"));
        assert_eq!(e.line, 3);
    }

    #[test]
    fn duplicate_state_id() {
        let e = parse_statemachine("statemachine M\nstate a {}\nstate b { state a {} }\n").unwrap_err();
        assert_eq!((e.line, e.column), (3, 17));
    }

    #[test]
    fn structural_errors() {
        assert!(parse_statemachine("statemachine M\nstate a {\n").is_err());
        assert!(parse_statemachine("statemachine M\ninitial q\nstate a {}\n").is_err());
        assert!(parse_statemachine("statemachine M\nentry \"x\"\n").is_err());
        assert!(parse_statemachine("state a {}\n").is_err());
        assert!(parse_statemachine("statemachine M\nstate a {} state b {}\n").is_err());
    }

    #[test]
    fn provenance_comments_are_ignored_on_reparse() {
        let m = parse_statemachine("statemachine M\nstate a {}\n# prov state a <- n1\n").unwrap();
        assert_eq!(m.roots.len(), 1);
    }
}
