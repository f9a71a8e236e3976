//! The `.sue-rules` language: fluent declarations plus initiate/terminate
//! rules over simple-event patterns with spatiotemporal windows.
//!
//! Note that the unit `m` is positional: inside a window the duration comes
//! first and `m` means minutes there, while after the comma it means meters.
//! `within 2m, 2m` is two minutes and two meters.

mod ast;
mod format;
mod lexer;
mod parser;

use alloc::string::String;
use core::fmt;

use serde::{Deserialize, Serialize};

pub use ast::{EventPattern, Rule, RuleKind, RuleSet, Window};
pub use format::{format_rule, format_rules};
pub use parser::parse_rules;

/// Words that cannot be used as fluent names or event types.
pub fn is_keyword(word: &str) -> bool {
    parser::KEYWORDS.contains(&word)
}

/// A problem in rule source, at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Diagnostic { line, column, message: message.into() }
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}
