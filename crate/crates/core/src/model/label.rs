use std::fmt;

use indexmap::{IndexMap, IndexSet};
use serde::Serialize;

use crate::error::ModelError;

/// A behavior string: an event, guard, or action.
///
/// Whitespace is normalized once at construction (trimmed, inner runs
/// collapsed to a single space). Comparison afterwards is exact and
/// case-sensitive.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Label(String);

impl Label {
    pub fn new(raw: &str) -> Result<Self, ModelError> {
        let text = raw.split_whitespace().collect::<Vec<_>>().join(" ");
        if text.is_empty() {
            return Err(ModelError::MalformedLabel(raw.to_string()));
        }
        Ok(Label(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl AsRef<str> for Label {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// Shared wording for behaviors: canonical labels plus single-hop aliases.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    canonical: IndexSet<Label>,
    aliases: IndexMap<Label, Label>,
}

impl Vocabulary {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_canonical(&mut self, label: Label) -> Result<(), ModelError> {
        if self.aliases.contains_key(&label) {
            return Err(ModelError::Vocabulary(format!("\"{label}\" is already declared as an alias")));
        }
        if !self.canonical.insert(label.clone()) {
            return Err(ModelError::Vocabulary(format!("duplicate canonical label \"{label}\"")));
        }
        Ok(())
    }

    pub fn add_alias(&mut self, alias: Label, target: Label) -> Result<(), ModelError> {
        if !self.canonical.contains(&target) {
            return Err(ModelError::Vocabulary(format!("alias target \"{target}\" is not a canonical label")));
        }
        if self.canonical.contains(&alias) {
            return Err(ModelError::Vocabulary(format!("\"{alias}\" is canonical and cannot be an alias")));
        }
        if let Some(prev) = self.aliases.get(&alias) {
            return Err(ModelError::Vocabulary(format!("alias \"{alias}\" already points at \"{prev}\"")));
        }
        self.aliases.insert(alias, target);
        Ok(())
    }

    /// Maps an alias to its canonical label; anything else is returned as is.
    pub fn canonicalize(&self, label: &Label) -> Label {
        self.aliases.get(label).cloned().unwrap_or_else(|| label.clone())
    }

    pub fn canonical(&self) -> impl Iterator<Item = &Label> {
        self.canonical.iter()
    }

    pub fn aliases(&self) -> impl Iterator<Item = (&Label, &Label)> {
        self.aliases.iter()
    }

    pub fn is_alias(&self, label: &Label) -> bool {
        self.aliases.contains_key(label)
    }

    pub fn is_empty(&self) -> bool {
        self.canonical.is_empty() && self.aliases.is_empty()
    }

    pub fn validate(&self) -> Vec<String> {
        let mut out = Vec::new();
        for (alias, target) in &self.aliases {
            if !self.canonical.contains(target) {
                out.push(format!("alias \"{alias}\" targets non-canonical \"{target}\""));
            }
            if self.canonical.contains(alias) {
                out.push(format!("alias \"{alias}\" is also canonical"));
            }
        }
        out
    }
}

pub fn normalize_label(raw: &str, vocab: Option<&Vocabulary>) -> Result<Label, ModelError> {
    let label = Label::new(raw)?;
    Ok(match vocab {
        Some(v) => v.canonicalize(&label),
        None => label,
    })
}
