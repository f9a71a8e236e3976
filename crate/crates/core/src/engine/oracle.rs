//! Exact fluent probabilities by enumerating possible worlds.
//!
//! Each relevant event either occurs or not, independently with its
//! confidence. In every world groundings are deterministic and the fluent
//! follows the plain event calculus: it holds after a tick in which any
//! initiating grounding fires, stops holding after a tick in which only
//! terminating groundings fire, and otherwise keeps its previous value.
//! The answer is the total weight of the worlds in which it holds.
//!
//! The grounding search here is a direct tuple enumeration over the whole
//! event list and deliberately shares no code with the streaming matcher.

use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use super::TickClock;
use crate::model::{great_circle_m, SimpleEvent};
use crate::rules::{RuleKind, RuleSet};
use crate::Error;

/// Largest number of relevant events the oracle will enumerate.
pub const ORACLE_MAX_EVENTS: usize = 20;

struct WorldGrounding {
    /// Bit mask over the relevant events.
    mask: u32,
    tick: u64,
    initiates: bool,
}

/// Probability that `fluent` holds after tick `tick` has been processed.
pub fn exact_holds_probability(
    rules: &RuleSet,
    events: &[SimpleEvent],
    fluent: &str,
    tick: u64,
    clock: &TickClock,
) -> Result<f64, Error> {
    Ok(exact_holds_series(rules, events, fluent, tick, clock)?[tick as usize])
}

/// Holds-probabilities for every tick `0..=through_tick` from one enumeration.
pub fn exact_holds_series(
    rules: &RuleSet,
    events: &[SimpleEvent],
    fluent: &str,
    through_tick: u64,
    clock: &TickClock,
) -> Result<Vec<f64>, Error> {
    let fluent_rules: Vec<_> = rules.rules.iter().filter(|r| r.fluent == fluent).collect();

    // Relevant events: could match some pattern of this fluent. First id wins.
    let mut ids = BTreeSet::new();
    let relevant: Vec<(&SimpleEvent, u64)> = events
        .iter()
        .filter(|e| ids.insert(e.id.as_str()))
        .filter_map(|e| clock.index_of(e.time).map(|t| (e, t)))
        .filter(|(e, _)| fluent_rules.iter().flat_map(|r| &r.patterns).any(|p| p.matches(e)))
        .collect();
    let n = relevant.len();
    if n > ORACLE_MAX_EVENTS {
        return Err(Error::TooManyEvents { count: n, max: ORACLE_MAX_EVENTS });
    }

    let mut groundings = Vec::new();
    for rule in &fluent_rules {
        let k = rule.patterns.len();
        let window = rule.effective_window();
        let mut masks = BTreeSet::new();
        // odometer over all n^k index tuples
        let mut idx = vec![0usize; k];
        if n == 0 {
            continue;
        }
        loop {
            let tuple: Vec<&(&SimpleEvent, u64)> = idx.iter().map(|&i| &relevant[i]).collect();
            let distinct = (0..k).all(|a| (a + 1..k).all(|b| idx[a] != idx[b]));
            let typed = tuple.iter().zip(&rule.patterns).all(|((e, _), p)| p.matches(e));
            let windowed = window.is_none_or(|w| {
                (0..k).all(|a| {
                    (a + 1..k).all(|b| {
                        let (ea, eb) = (tuple[a].0, tuple[b].0);
                        let dt = if ea.time > eb.time { ea.time - eb.time } else { eb.time - ea.time };
                        dt as u64 <= w.within_ms && great_circle_m(ea.position, eb.position) <= w.within_m
                    })
                })
            });
            if distinct && typed && windowed {
                let mask = idx.iter().fold(0u32, |m, &i| m | (1 << i));
                let anchor = tuple.iter().map(|(_, t)| *t).max().unwrap_or(0);
                if masks.insert((mask, anchor)) {
                    groundings.push(WorldGrounding {
                        mask,
                        tick: anchor,
                        initiates: rule.kind == RuleKind::Initiates,
                    });
                }
            }
            // advance the odometer
            let mut pos = 0;
            loop {
                if pos == k {
                    break;
                }
                idx[pos] += 1;
                if idx[pos] < n {
                    break;
                }
                idx[pos] = 0;
                pos += 1;
            }
            if pos == k {
                break;
            }
        }
    }
    groundings.retain(|g| g.tick <= through_tick);
    groundings.sort_by_key(|g| g.tick);
    let anchors: Vec<u64> = {
        let mut a: Vec<u64> = groundings.iter().map(|g| g.tick).collect();
        a.dedup();
        a
    };

    // Weight of worlds in which the fluent holds right after each anchor tick.
    let mut holds_after = vec![0.0f64; anchors.len()];
    for world in 0u32..(1u32 << n) {
        let weight: f64 = relevant
            .iter()
            .enumerate()
            .map(|(i, (e, _))| if world & (1 << i) != 0 { e.confidence } else { 1.0 - e.confidence })
            .product();
        if weight == 0.0 {
            continue;
        }
        let mut holds = false;
        let mut g = 0;
        for (slot, &anchor) in anchors.iter().enumerate() {
            let (mut init, mut term) = (false, false);
            while g < groundings.len() && groundings[g].tick == anchor {
                let gr = &groundings[g];
                if gr.mask & world == gr.mask {
                    if gr.initiates {
                        init = true;
                    } else {
                        term = true;
                    }
                }
                g += 1;
            }
            if init {
                holds = true;
            } else if term {
                holds = false;
            }
            if holds {
                holds_after[slot] += weight;
            }
        }
    }

    let mut series = vec![0.0; through_tick as usize + 1];
    let mut slot = 0;
    let mut current = 0.0;
    for (t, value) in series.iter_mut().enumerate() {
        while slot < anchors.len() && anchors[slot] == t as u64 {
            current = holds_after[slot];
            slot += 1;
        }
        *value = current;
    }
    Ok(series)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::test_support::{ev, shooting_rules};

    fn clock() -> TickClock {
        TickClock::new(0, 1_000).unwrap()
    }

    #[test]
    fn single_initiation() {
        let rules = shooting_rules();
        let single = crate::rules::parse_rules("fluent shooting\ninitiate shooting when gunshot").unwrap();
        let events = [ev("g", "gunshot", 1_200, 0.0, 0.6)];
        assert_eq!(exact_holds_probability(&single, &events, "shooting", 0, &clock()).unwrap(), 0.0);
        let p = exact_holds_probability(&single, &events, "shooting", 1, &clock()).unwrap();
        assert!((p - 0.6).abs() < 1e-15);
        // the conjunction rule cannot fire on a lone gunshot
        assert_eq!(exact_holds_probability(&rules, &events, "shooting", 5, &clock()).unwrap(), 0.0);
    }

    #[test]
    fn initiate_then_terminate() {
        let rules =
            crate::rules::parse_rules("fluent f\ninitiate f when a\nterminate f when b").unwrap();
        let events = [ev("a", "a", 1_000, 0.0, 0.6), ev("b", "b", 3_000, 0.0, 0.5)];
        let series = exact_holds_series(&rules, &events, "f", 4, &clock()).unwrap();
        assert_eq!(series[0], 0.0);
        assert!((series[1] - 0.6).abs() < 1e-15);
        assert!((series[2] - 0.6).abs() < 1e-15);
        // only the world (a occurs, b does not) holds: 0.6 * 0.5
        assert!((series[3] - 0.30).abs() < 1e-15);
        assert!((series[4] - 0.30).abs() < 1e-15);
    }

    #[test]
    fn same_tick_initiation_wins() {
        let rules =
            crate::rules::parse_rules("fluent f\ninitiate f when a\nterminate f when b").unwrap();
        let events = [
            ev("a1", "a", 0, 0.0, 0.6),
            ev("a2", "a", 2_000, 0.0, 0.6),
            ev("b", "b", 2_500, 0.0, 0.5),
        ];
        let p = exact_holds_probability(&rules, &events, "f", 2, &clock()).unwrap();
        assert!((p - 0.72).abs() < 1e-12);
    }

    #[test]
    fn no_events() {
        let rules = shooting_rules();
        let series = exact_holds_series(&rules, &[], "shooting", 10, &clock()).unwrap();
        assert!(series.iter().all(|&p| p == 0.0));
    }

    #[test]
    fn refuses_large_inputs() {
        let rules = crate::rules::parse_rules("fluent f\ninitiate f when a").unwrap();
        let events: Vec<_> = (0..21)
            .map(|i| ev(&alloc::format!("a{i}"), "a", i * 10, 0.0, 0.5))
            .collect();
        assert_eq!(
            exact_holds_probability(&rules, &events, "f", 0, &clock()),
            Err(Error::TooManyEvents { count: 21, max: 20 })
        );
        // irrelevant events do not count against the bound
        let mut mixed: Vec<_> = events[..20].to_vec();
        mixed.push(ev("z", "zzz", 0, 0.0, 0.5));
        assert!(exact_holds_probability(&rules, &mixed, "f", 0, &clock()).is_ok());
    }
}
