#![allow(dead_code)]

use std::path::PathBuf;

use rand::rngs::StdRng;
use rand::Rng;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

pub fn read_fixture(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

const WORDS: [&str; 8] = ["a", "b", "c", "go", "stop", "open door", "E0", "A0"];

fn word(rng: &mut StdRng) -> String {
    WORDS[rng.gen_range(0..WORDS.len())].to_string()
}

/// Random well-formed workflows: sequences of labelled nodes, decisions whose
/// branches rejoin at a merge or end at the final node, and loops closed
/// through a merge. Every non-decision node has one outgoing edge.
pub struct WorkflowGen<'r> {
    rng: &'r mut StdRng,
    lines: Vec<String>,
    edges: Vec<String>,
    next: usize,
    budget: usize,
    pending_guard: Option<String>,
}

impl<'r> WorkflowGen<'r> {
    pub fn generate(rng: &'r mut StdRng, max_nodes: usize) -> String {
        let mut g = WorkflowGen {
            rng,
            lines: Vec::new(),
            edges: Vec::new(),
            next: 0,
            budget: max_nodes.saturating_sub(2),
            pending_guard: None,
        };
        let init = g.node("initial".into());
        let fin = "fin".to_string();
        if let Some(last) = g.block(init, &fin, 0, true) {
            g.edge(&last, &fin);
        }
        let mut out = String::from("workflow Random\n");
        if g.rng.gen_bool(0.7) {
            out += "precondition \"ready\"\n";
        }
        if g.rng.gen_bool(0.5) {
            out += "postcondition \"finished\"\n";
        }
        for l in &g.lines {
            out += l;
            out.push('\n');
        }
        out += "node fin final\n";
        for e in &g.edges {
            out += e;
            out.push('\n');
        }
        if g.rng.gen_bool(0.5) {
            out += "node p0 initial in Peer\nnode p1 send \"a\" in Peer\nnode p2 final in Peer\nedge p0 -> p1\nedge p1 -> p2\n";
        }
        out
    }

    fn node(&mut self, kind: String) -> String {
        let id = format!("n{}", self.next);
        self.next += 1;
        self.lines.push(format!("node {id} {kind}"));
        id
    }

    fn edge(&mut self, from: &str, to: &str) {
        match self.pending_guard.take() {
            Some(g) => self.edges.push(format!("edge {from} -> {to} [guard \"{g}\"]")),
            None => self.edges.push(format!("edge {from} -> {to}")),
        }
    }

    fn labelled(&mut self) -> String {
        let l = word(self.rng);
        let kind = match self.rng.gen_range(0..5) {
            0 => format!("action \"{l}\""),
            1 => format!("send \"{l}\""),
            2 => format!("receive \"{l}\""),
            3 => format!("timer \"{l}\""),
            _ => format!("update \"{l}\""),
        };
        self.node(kind)
    }

    /// Extends the flow from `prev`; returns the last node, or `None` when
    /// every path ended at the final node.
    fn block(&mut self, mut prev: String, fin: &str, depth: usize, allow_final: bool) -> Option<String> {
        loop {
            if self.budget == 0 || self.rng.gen_bool(0.25) {
                return Some(prev);
            }
            match self.rng.gen_range(0..6) {
                0 if depth < 3 && self.budget >= 3 => {
                    self.budget -= 2;
                    let d = self.node("decision".into());
                    self.edge(&prev, &d);
                    let mut merge: Option<String> = None;
                    let branches = self.rng.gen_range(2..=3);
                    let mut unguarded = false;
                    for _ in 0..branches {
                        let guard = if !unguarded && self.rng.gen_bool(0.2) {
                            unguarded = true;
                            None
                        } else {
                            Some(word(self.rng))
                        };
                        self.pending_guard = guard;
                        let exit = self.block(d.clone(), fin, depth + 1, allow_final);
                        let Some(exit) = exit else { continue };
                        if allow_final && self.rng.gen_bool(0.2) {
                            self.edge(&exit, fin);
                        } else {
                            let m = match &merge {
                                Some(m) => m.clone(),
                                None => {
                                    let m = self.node("merge".into());
                                    merge = Some(m.clone());
                                    m
                                }
                            };
                            self.edge(&exit, &m);
                        }
                    }
                    self.pending_guard = None;
                    prev = merge?;
                }
                1 if depth < 3 && self.budget >= 3 => {
                    self.budget -= 2;
                    let m = self.node("merge".into());
                    self.edge(&prev, &m);
                    let body = self.block(m.clone(), fin, depth + 1, false).expect("loop bodies never end");
                    let d = self.node("decision".into());
                    self.edge(&body, &d);
                    self.pending_guard = Some(word(self.rng));
                    self.edge(&d, &m);
                    self.pending_guard = Some(word(self.rng));
                    prev = d;
                }
                _ => {
                    self.budget -= 1;
                    let n = self.labelled();
                    self.edge(&prev, &n);
                    prev = n;
                }
            }
        }
    }
}

/// Random hierarchical evaluation machine. Composite states carry no entry
/// actions and are never the source of a transition; targets may be any state.
pub fn random_machine(rng: &mut StdRng) -> String {
    struct S {
        id: String,
        name: String,
        entries: Vec<String>,
        children: Vec<S>,
        is_final: bool,
        initial: Option<usize>,
    }
    fn build(rng: &mut StdRng, depth: usize, next: &mut usize, leaves: &mut Vec<String>, all: &mut Vec<String>) -> S {
        let id = format!("q{next}");
        *next += 1;
        all.push(id.clone());
        let name = format!("{} {}", ["idle", "busy", "wait", "run"][rng.gen_range(0..4)], id);
        let composite = depth < 3 && rng.gen_bool(0.35);
        let mut s = S { id, name, entries: Vec::new(), children: Vec::new(), is_final: false, initial: None };
        if composite {
            for _ in 0..rng.gen_range(1..=3) {
                s.children.push(build(rng, depth + 1, next, leaves, all));
            }
            if rng.gen_bool(0.5) {
                s.initial = Some(rng.gen_range(0..s.children.len()));
            }
        } else {
            for _ in 0..rng.gen_range(0..3) {
                s.entries.push(word(rng));
            }
            s.is_final = rng.gen_bool(0.1);
            leaves.push(s.id.clone());
        }
        s
    }
    fn write(s: &S, depth: usize, out: &mut String) {
        let pad = "  ".repeat(depth);
        out.push_str(&format!("{pad}state {} \"{}\" {{\n", s.id, s.name));
        for e in &s.entries {
            out.push_str(&format!("{pad}  entry \"{e}\"\n"));
        }
        if s.is_final {
            out.push_str(&format!("{pad}  final\n"));
        }
        if let Some(i) = s.initial {
            out.push_str(&format!("{pad}  initial {}\n", s.children[i].id));
        }
        for c in &s.children {
            write(c, depth + 1, out);
        }
        out.push_str(&format!("{pad}}}\n"));
    }
    let mut next = 0;
    let mut leaves = Vec::new();
    let mut all = Vec::new();
    let roots: Vec<S> = (0..rng.gen_range(1..=4)).map(|_| build(rng, 0, &mut next, &mut leaves, &mut all)).collect();
    let mut out = String::from("statemachine Random\n");
    out += &format!("initial {}\n", roots[0].id);
    for r in &roots {
        write(r, 0, &mut out);
    }
    for _ in 0..rng.gen_range(0..8) {
        let a = &leaves[rng.gen_range(0..leaves.len())];
        let b = &all[rng.gen_range(0..all.len())];
        let mut line = format!("transition {a} -> {b}");
        if rng.gen_bool(0.5) {
            line += &format!(" on \"{}\"", word(rng));
        }
        if rng.gen_bool(0.4) {
            line += &format!(" [\"{}\"]", word(rng));
        }
        if rng.gen_bool(0.5) {
            let acts: Vec<String> = (0..rng.gen_range(1..=3)).map(|_| format!("\"{}\"", word(rng))).collect();
            line += &format!(" / {}", acts.join(", "));
        }
        out += &line;
        out.push('\n');
    }
    out
}
