use alloc::collections::BTreeSet;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::model::{Modality, SimpleEvent};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RuleKind {
    Initiates,
    Terminates,
}

impl RuleKind {
    pub fn keyword(self) -> &'static str {
        match self {
            RuleKind::Initiates => "initiate",
            RuleKind::Terminates => "terminate",
        }
    }
}

/// One conjunct of a rule body: which detector output it matches.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EventPattern {
    pub event_type: String,
    #[serde(default)]
    pub min_confidence: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub modality: Option<Modality>,
}

impl EventPattern {
    pub fn new(event_type: impl Into<String>) -> Self {
        EventPattern {
            event_type: event_type.into(),
            min_confidence: 0.0,
            modality: None,
        }
    }

    pub fn matches(&self, e: &SimpleEvent) -> bool {
        e.event_type == self.event_type
            && e.confidence >= self.min_confidence
            && self.modality.is_none_or(|m| m == e.modality)
    }
}

/// Spatiotemporal window every pair of a conjunction must fit in.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub within_ms: u64,
    pub within_m: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    pub kind: RuleKind,
    pub fluent: String,
    pub patterns: Vec<EventPattern>,
    /// Required for conjunctions, ignored for single-pattern rules.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<Window>,
}

impl Rule {
    /// The window that actually constrains groundings of this rule.
    pub fn effective_window(&self) -> Option<Window> {
        if self.patterns.len() > 1 {
            self.window
        } else {
            None
        }
    }
}

/// A validated collection of fluents and the rules that drive them.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RuleSet {
    pub fluents: BTreeSet<String>,
    pub rules: Vec<Rule>,
}

impl RuleSet {
    pub fn is_empty(&self) -> bool {
        self.fluents.is_empty() && self.rules.is_empty()
    }

    /// Largest temporal window of any conjunction, 0 if there is none.
    pub fn max_within_ms(&self) -> u64 {
        self.rules
            .iter()
            .filter_map(|r| r.effective_window())
            .map(|w| w.within_ms)
            .max()
            .unwrap_or(0)
    }

    pub fn rules_for<'a>(&'a self, fluent: &'a str) -> impl Iterator<Item = (usize, &'a Rule)> + 'a {
        self.rules.iter().enumerate().filter(move |(_, r)| r.fluent == fluent)
    }

    /// Whether any pattern of any rule could match events of this type.
    pub fn mentions(&self, event_type: &str) -> bool {
        self.rules
            .iter()
            .flat_map(|r| &r.patterns)
            .any(|p| p.event_type == event_type)
    }
}
