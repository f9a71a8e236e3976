use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::Grounding;
use crate::rules::{format_rule, RuleKind};

/// `P' = I + (1 - I) * P * (1 - T)`: initiation dominates termination
/// within a tick and the fluent otherwise persists by inertia.
pub fn update_probability(prior: f64, init: f64, term: f64) -> f64 {
    init + (1.0 - init) * prior * (1.0 - term)
}

/// Probability that at least one of several independent groundings occurs.
pub fn any_occurs(probs: impl IntoIterator<Item = f64>) -> f64 {
    1.0 - probs.into_iter().map(|p| 1.0 - p).product::<f64>()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FiredGrounding {
    pub kind: RuleKind,
    pub rule: String,
    pub event_ids: Vec<String>,
    pub occurrence_prob: f64,
}

impl FiredGrounding {
    pub fn from_grounding(g: &Grounding<'_>) -> Self {
        FiredGrounding {
            kind: g.rule.kind,
            rule: format_rule(g.rule),
            event_ids: g.events.iter().map(|e| e.id.clone()).collect(),
            occurrence_prob: g.occurrence_prob,
        }
    }
}

/// Symbolic record of one fluent update.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProofTrace {
    pub fluent: String,
    pub tick: u64,
    pub fired_groundings: Vec<FiredGrounding>,
    pub prob_before: f64,
    pub init_prob: f64,
    pub term_prob: f64,
    pub prob_after: f64,
    /// Set when groundings of this fluent share events, which breaks the
    /// independence the update equation relies on.
    #[serde(default, skip_serializing_if = "core::ops::Not::not")]
    pub approximate: bool,
}

impl ProofTrace {
    pub fn recompute(&self) -> f64 {
        update_probability(self.prob_before, self.init_prob, self.term_prob)
    }

    /// True when `prob_after` is exactly what the update equation yields.
    pub fn is_consistent(&self) -> bool {
        self.recompute().to_bits() == self.prob_after.to_bits()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FluentHistoryEntry {
    pub tick: u64,
    pub prob: f64,
    pub init_prob: f64,
    pub term_prob: f64,
}

/// Running probability that a fluent holds.
///
/// `history` has one entry per applied update, in tick order. Ticks the
/// engine skips because nothing fired hold the previous value by inertia;
/// [`FluentState::prob_at`] reads through them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FluentState {
    pub fluent: String,
    pub prob: f64,
    pub history: Vec<FluentHistoryEntry>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub active_complex: Option<String>,
    /// Index of the tick the next update applies to.
    pub next_tick: u64,
}

impl FluentState {
    pub fn new(fluent: impl Into<String>, first_tick: u64) -> Self {
        FluentState {
            fluent: fluent.into(),
            prob: 0.0,
            history: Vec::new(),
            active_complex: None,
            next_tick: first_tick,
        }
    }

    /// Moves to `tick` without updates; the probability persists.
    pub fn skip_to(&mut self, tick: u64) {
        self.next_tick = self.next_tick.max(tick);
    }

    /// Probability after `tick` was processed. Before the first entry this
    /// is 0, the initial value of every engine fluent.
    pub fn prob_at(&self, tick: u64) -> f64 {
        match self.history.partition_point(|h| h.tick <= tick) {
            0 => 0.0,
            i => self.history[i - 1].prob,
        }
    }

    /// In-place form of [`tick_update`].
    pub fn apply(&mut self, inits: &[Grounding<'_>], terms: &[Grounding<'_>]) -> ProofTrace {
        let init_prob = any_occurs(inits.iter().map(|g| g.occurrence_prob));
        let term_prob = any_occurs(terms.iter().map(|g| g.occurrence_prob));
        let prob_before = self.prob;
        let prob_after = update_probability(prob_before, init_prob, term_prob);
        let tick = self.next_tick;
        self.prob = prob_after;
        self.history.push(FluentHistoryEntry { tick, prob: prob_after, init_prob, term_prob });
        self.next_tick += 1;
        ProofTrace {
            fluent: self.fluent.clone(),
            tick,
            fired_groundings: inits.iter().chain(terms).map(FiredGrounding::from_grounding).collect(),
            prob_before,
            init_prob,
            term_prob,
            prob_after,
            approximate: false,
        }
    }
}

/// Advances a fluent by one tick given the groundings anchored there.
pub fn tick_update(
    state: &FluentState,
    inits: &[Grounding<'_>],
    terms: &[Grounding<'_>],
) -> (FluentState, ProofTrace) {
    let mut next = state.clone();
    let trace = next.apply(inits, terms);
    (next, trace)
}
