use alloc::collections::BTreeSet;
use alloc::vec::Vec;

use super::{Tick, TickClock};
use crate::model::{great_circle_m, SimpleEvent};
use crate::rules::{Rule, RuleSet};

/// A concrete binding of a rule's patterns to events.
#[derive(Debug, Clone, PartialEq)]
pub struct Grounding<'a> {
    pub rule_index: usize,
    pub rule: &'a Rule,
    /// One event per pattern, in pattern order.
    pub events: Vec<&'a SimpleEvent>,
    /// Product of the constituent confidences.
    pub occurrence_prob: f64,
}

/// An event together with the tick it is anchored to.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Candidate<'a> {
    pub event: &'a SimpleEvent,
    pub tick: u64,
}

/// Every grounding of every rule whose latest event falls in `tick`.
///
/// `window_events` should hold all events from `tick.start - max within_ms`
/// up to the end of the tick. Events after the tick are ignored.
pub fn find_groundings<'a>(
    rules: &'a RuleSet,
    window_events: &'a [SimpleEvent],
    tick: Tick,
) -> Vec<Grounding<'a>> {
    let clock = TickClock::of_tick(&tick);
    let candidates: Vec<Candidate<'a>> = window_events
        .iter()
        .filter_map(|e| clock.index_of(e.time).map(|t| Candidate { event: e, tick: t }))
        .filter(|c| c.tick <= tick.index)
        .collect();
    ground(rules.rules.iter().enumerate(), &candidates, tick.index)
}

pub(crate) fn ground<'a>(
    which: impl Iterator<Item = (usize, &'a Rule)>,
    candidates: &[Candidate<'a>],
    anchor: u64,
) -> Vec<Grounding<'a>> {
    let mut out = Vec::new();
    for (rule_index, rule) in which {
        let per_pattern: Vec<Vec<Candidate<'a>>> = rule
            .patterns
            .iter()
            .map(|p| candidates.iter().copied().filter(|c| p.matches(c.event)).collect())
            .collect();
        if per_pattern.iter().any(Vec::is_empty) {
            continue;
        }
        let mut seen: BTreeSet<Vec<&str>> = BTreeSet::new();
        let mut chosen: Vec<Candidate<'a>> = Vec::with_capacity(rule.patterns.len());
        extend(rule, &per_pattern, anchor, &mut chosen, &mut |picked| {
            let mut key: Vec<&str> = picked.iter().map(|c| c.event.id.as_str()).collect();
            key.sort_unstable();
            if seen.insert(key) {
                out.push(Grounding {
                    rule_index,
                    rule,
                    events: picked.iter().map(|c| c.event).collect(),
                    occurrence_prob: picked.iter().map(|c| c.event.confidence).product(),
                });
            }
        });
    }
    out
}

fn extend<'a>(
    rule: &Rule,
    per_pattern: &[Vec<Candidate<'a>>],
    anchor: u64,
    chosen: &mut Vec<Candidate<'a>>,
    emit: &mut impl FnMut(&[Candidate<'a>]),
) {
    let depth = chosen.len();
    if depth == per_pattern.len() {
        if chosen.iter().map(|c| c.tick).max() == Some(anchor) {
            emit(chosen);
        }
        return;
    }
    let window = rule.effective_window();
    for &c in &per_pattern[depth] {
        if chosen.iter().any(|o| o.event.id == c.event.id) {
            continue;
        }
        if let Some(w) = window {
            let fits = chosen.iter().all(|o| {
                o.event.time.abs_diff(c.event.time) <= w.within_ms
                    && great_circle_m(o.event.position, c.event.position) <= w.within_m
            });
            if !fits {
                continue;
            }
        }
        chosen.push(c);
        extend(rule, per_pattern, anchor, chosen, emit);
        chosen.pop();
    }
}
