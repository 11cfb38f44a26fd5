use std::collections::{HashMap, HashSet};

use super::Label;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct State {
    pub id: String,
    pub name: String,
    pub entry_actions: Vec<Label>,
    pub children: Vec<State>,
    pub is_initial_in_parent: bool,
    pub is_final: bool,
}

impl State {
    pub fn new(id: impl Into<String>, name: impl Into<String>) -> Self {
        State {
            id: id.into(),
            name: name.into(),
            entry_actions: Vec::new(),
            children: Vec::new(),
            is_initial_in_parent: false,
            is_final: false,
        }
    }

    pub fn is_composite(&self) -> bool {
        !self.children.is_empty()
    }

    /// Pre-order walk over this state and its descendants.
    pub fn walk<'a>(&'a self, out: &mut Vec<&'a State>) {
        out.push(self);
        for c in &self.children {
            c.walk(out);
        }
    }

    pub fn descendant_ids(&self) -> HashSet<&str> {
        let mut all = Vec::new();
        self.walk(&mut all);
        all.into_iter().map(|s| s.id.as_str()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Transition {
    pub source: String,
    pub target: String,
    pub event: Option<Label>,
    pub guard: Option<Label>,
    pub actions: Vec<Label>,
}

impl Transition {
    pub fn new(source: impl Into<String>, target: impl Into<String>) -> Self {
        Transition { source: source.into(), target: target.into(), event: None, guard: None, actions: Vec::new() }
    }

    pub fn is_unconditional(&self) -> bool {
        self.event.is_none() && self.guard.is_none() && self.actions.is_empty()
    }

    /// Event, then guard, then actions.
    pub fn behaviors(&self) -> Vec<&Label> {
        self.event.iter().chain(self.guard.iter()).chain(self.actions.iter()).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateMachine {
    pub name: String,
    pub roots: Vec<State>,
    pub transitions: Vec<Transition>,
}

impl StateMachine {
    pub fn new(name: impl Into<String>) -> Self {
        StateMachine { name: name.into(), roots: Vec::new(), transitions: Vec::new() }
    }

    /// All states in pre-order (declaration order).
    pub fn states(&self) -> Vec<&State> {
        let mut out = Vec::new();
        for r in &self.roots {
            r.walk(&mut out);
        }
        out
    }

    pub fn state(&self, id: &str) -> Option<&State> {
        self.states().into_iter().find(|s| s.id == id)
    }

    /// Map from state id to its parent id (`None` for roots).
    pub fn parents(&self) -> HashMap<&str, Option<&str>> {
        fn go<'a>(s: &'a State, parent: Option<&'a str>, out: &mut HashMap<&'a str, Option<&'a str>>) {
            out.insert(s.id.as_str(), parent);
            for c in &s.children {
                go(c, Some(s.id.as_str()), out);
            }
        }
        let mut out = HashMap::new();
        for r in &self.roots {
            go(r, None, &mut out);
        }
        out
    }

    /// Resolves a `/`-separated path of ids, each a child of the previous.
    /// The empty path is the root scope and yields `None`.
    pub fn resolve_scope(&self, path: &ScopePath) -> Result<Option<&State>, String> {
        let mut level: &[State] = &self.roots;
        let mut found = None;
        for seg in &path.0 {
            let s = level.iter().find(|s| &s.id == seg).ok_or_else(|| seg.clone())?;
            level = &s.children;
            found = Some(s);
        }
        Ok(found)
    }

    /// Children of the scope: the roots for the empty path.
    pub fn scope_children(&self, path: &ScopePath) -> Result<&[State], String> {
        Ok(match self.resolve_scope(path)? {
            Some(s) => &s.children,
            None => &self.roots,
        })
    }

    /// Path from the root scope to `id` inclusive, if the state exists.
    pub fn path_of(&self, id: &str) -> Option<ScopePath> {
        let parents = self.parents();
        parents.get(id)?;
        let mut segs = vec![id.to_string()];
        let mut cur = id;
        while let Some(Some(p)) = parents.get(cur) {
            segs.push(p.to_string());
            cur = p;
        }
        segs.reverse();
        Some(ScopePath(segs))
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        let mut ids = HashSet::new();
        for s in self.states() {
            if !ids.insert(s.id.as_str()) {
                out.push(format!("duplicate state id {:?}", s.id));
            }
            if s.children.iter().filter(|c| c.is_initial_in_parent).count() > 1 {
                out.push(format!("state {:?} has more than one initial child", s.id));
            }
        }
        if self.roots.iter().filter(|c| c.is_initial_in_parent).count() > 1 {
            out.push("more than one initial root state".to_string());
        }
        for (i, t) in self.transitions.iter().enumerate() {
            for end in [&t.source, &t.target] {
                if !ids.contains(end.as_str()) {
                    out.push(format!("transition {i} references unknown state {end:?}"));
                }
            }
        }
        out
    }
}

/// A `/`-separated list of state ids naming a layer; empty is the first layer.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ScopePath(pub Vec<String>);

impl ScopePath {
    pub fn root() -> Self {
        ScopePath(Vec::new())
    }

    pub fn parse(text: &str) -> Self {
        ScopePath(text.split('/').map(str::trim).filter(|s| !s.is_empty()).map(String::from).collect())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, id: &str) -> Self {
        let mut v = self.0.clone();
        v.push(id.to_string());
        ScopePath(v)
    }

    pub fn last(&self) -> Option<&str> {
        self.0.last().map(String::as_str)
    }
}

impl std::fmt::Display for ScopePath {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_empty() {
            f.write_str("/")
        } else {
            f.write_str(&self.0.join("/"))
        }
    }
}
