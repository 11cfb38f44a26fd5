use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("malformed label {0:?}: empty after whitespace normalization")]
    MalformedLabel(String),
    #[error("vocabulary: {0}")]
    Vocabulary(String),
}

/// A located syntax or validation error in one of the text formats.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub file: Option<PathBuf>,
    /// 1-based.
    pub line: usize,
    /// 1-based.
    pub column: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError { file: None, line, column, message: message.into() }
    }

    pub fn with_file(mut self, file: impl Into<PathBuf>) -> Self {
        self.file = Some(file.into());
        self
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.file {
            Some(p) => write!(f, "{}:{}:{}: {}", p.display(), self.line, self.column, self.message),
            None => write!(f, "{}:{}: {}", self.line, self.column, self.message),
        }
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtractError {
    #[error("workflow has no partition named {0:?}")]
    UnknownPartition(String),
    #[error("partition {partition:?} is not well-formed: {problems}")]
    Invalid { partition: String, problems: String },
    #[error("unsupported node configuration at {node:?}: {reason}")]
    Unsupported { node: String, reason: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScopeError {
    #[error("no state {0:?} in scope path")]
    NotFound(String),
    #[error("scope {0:?} has no child states")]
    NoChildren(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error(transparent)]
    Extract(#[from] ExtractError),
    #[error(transparent)]
    Scope(#[from] ScopeError),
    #[error("evaluation model is not well-formed: {0}")]
    Evaluation(String),
}
