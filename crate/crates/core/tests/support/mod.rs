//! Generators shared by the property suites and the acceptance gate.
#![allow(dead_code)]

use std::collections::BTreeMap;

use proptest::prelude::*;
use sue_core::engine::{exact_holds_series, Engine, EngineConfig, EngineOutput, TickClock};
use sue_core::model::{GeoPoint, Modality, SimpleEvent, EARTH_RADIUS_M};
use sue_core::rules::{is_keyword, EventPattern, Rule, RuleKind, RuleSet, Window};

pub const ORIGIN: GeoPoint = GeoPoint { lat: 51.48, lon: -3.18 };
pub const TYPES: [&str; 4] = ["a", "b", "c", "d"];

/// A point `north_m` north and `east_m` east of [`ORIGIN`].
pub fn offset(north_m: f64, east_m: f64) -> GeoPoint {
    let dlat = (north_m / EARTH_RADIUS_M).to_degrees();
    let dlon = (east_m / (EARTH_RADIUS_M * ORIGIN.lat.to_radians().cos())).to_degrees();
    GeoPoint { lat: ORIGIN.lat + dlat, lon: ORIGIN.lon + dlon }
}

pub fn event(id: &str, event_type: &str, time: i64, north_m: f64, confidence: f64) -> SimpleEvent {
    SimpleEvent {
        id: id.into(),
        event_type: event_type.into(),
        sensor_id: "cam-1".into(),
        time,
        position: offset(north_m, 0.0),
        region_radius_m: 10.0,
        confidence,
        modality: Modality::Video,
        uncertainty: None,
        explanation: None,
    }
}

#[derive(Debug, Clone)]
pub struct Scenario {
    pub rules: RuleSet,
    pub events: Vec<SimpleEvent>,
}

fn scenario_pattern() -> impl Strategy<Value = EventPattern> {
    (prop::sample::select(&TYPES[..]), prop::sample::select(vec![0.0, 0.0, 0.3, 0.5])).prop_map(|(t, c)| {
        let mut p = EventPattern::new(t);
        p.min_confidence = c;
        p
    })
}

fn scenario_rule(fluent: String, kind: RuleKind) -> impl Strategy<Value = Rule> {
    (
        prop::collection::vec(scenario_pattern(), 1..=2),
        (5u64..=60).prop_map(|n| n * 100),
        20.0f64..400.0,
    )
        .prop_map(move |(patterns, within_ms, within_m)| Rule {
            kind,
            fluent: fluent.clone(),
            window: (patterns.len() > 1).then_some(Window { within_ms, within_m }),
            patterns,
        })
}

/// Rules over at most three fluents and the event types in [`TYPES`].
pub fn scenario_rules() -> impl Strategy<Value = RuleSet> {
    (1usize..=3)
        .prop_flat_map(|n| {
            let per_fluent: Vec<_> = (0..n)
                .map(|i| {
                    let f = format!("f{i}");
                    (
                        prop::collection::vec(scenario_rule(f.clone(), RuleKind::Initiates), 1..=2),
                        prop::collection::vec(scenario_rule(f, RuleKind::Terminates), 0..=2),
                    )
                })
                .collect();
            per_fluent
        })
        .prop_map(|per_fluent| {
            let mut rules = RuleSet::default();
            for (i, (inits, terms)) in per_fluent.into_iter().enumerate() {
                rules.fluents.insert(format!("f{i}"));
                rules.rules.extend(inits);
                rules.rules.extend(terms);
            }
            rules
        })
}

fn scenario_event() -> impl Strategy<Value = (String, i64, f64, f64, f64)> {
    (
        prop::sample::select(&TYPES[..]).prop_map(String::from),
        0i64..8_000,
        0.0f64..300.0,
        0.0f64..300.0,
        0.05f64..=1.0,
    )
}

/// Up to twelve events spread over eight one-second ticks and a 300 m square.
pub fn scenario() -> impl Strategy<Value = Scenario> {
    (scenario_rules(), prop::collection::vec(scenario_event(), 1..=12)).prop_map(|(rules, raw)| {
        let events = raw
            .into_iter()
            .enumerate()
            .map(|(i, (t, time, n, e, c))| {
                let mut ev = event(&format!("e{i}"), &t, time, n, c);
                ev.position = offset(n, e);
                ev
            })
            .collect();
        Scenario { rules, events }
    })
}

pub struct EngineRun {
    pub series: BTreeMap<String, Vec<f64>>,
    pub outputs: Vec<EngineOutput>,
    pub approximate: bool,
}

/// Ingests every event up front, then processes ticks through the last one.
pub fn run_engine(s: &Scenario) -> EngineRun {
    let mut engine = Engine::new(s.rules.clone(), EngineConfig::default()).unwrap();
    for e in &s.events {
        engine.ingest(e.clone()).unwrap();
    }
    let outputs = engine.flush();
    let approximate = outputs
        .iter()
        .any(|o| matches!(o, EngineOutput::Trace(t) if t.approximate));
    let ticks = engine.next_tick();
    let series = engine
        .fluent_states()
        .map(|st| (st.fluent.clone(), (0..ticks).map(|t| st.prob_at(t)).collect()))
        .collect();
    EngineRun { series, outputs, approximate }
}

/// Largest |engine - oracle| gap over every fluent and tick.
pub fn oracle_gap(s: &Scenario, run: &EngineRun) -> f64 {
    let clock = TickClock::new(0, 1_000).unwrap();
    let mut worst = 0.0f64;
    for (fluent, series) in &run.series {
        if series.is_empty() {
            continue;
        }
        let exact = exact_holds_series(&s.rules, &s.events, fluent, series.len() as u64 - 1, &clock).unwrap();
        assert_eq!(exact.len(), series.len());
        for (a, b) in series.iter().zip(&exact) {
            worst = worst.max((a - b).abs());
        }
    }
    worst
}

fn ident() -> impl Strategy<Value = String> {
    "[a-z][a-z0-9_]{0,7}".prop_filter("keyword", |s| !is_keyword(s))
}

fn any_pattern() -> impl Strategy<Value = EventPattern> {
    (
        ident(),
        prop_oneof![Just(0.0), 0.0f64..=1.0],
        prop::option::of(prop::sample::select(vec![
            Modality::Video,
            Modality::Audio,
            Modality::Multimodal,
            Modality::Other,
        ])),
    )
        .prop_map(|(t, c, m)| EventPattern { event_type: t, min_confidence: c, modality: m })
}

fn any_window() -> impl Strategy<Value = Window> {
    (
        prop_oneof![(1u64..=3_600).prop_map(|s| s * 1_000), 1u64..=10_000_000],
        prop_oneof![(1u32..=5_000).prop_map(f64::from), 0.001f64..1.0e6],
    )
        .prop_map(|(within_ms, within_m)| Window { within_ms, within_m })
}

fn any_rule(fluents: Vec<String>) -> impl Strategy<Value = Rule> {
    (
        prop::sample::select(fluents),
        prop::bool::ANY,
        prop::collection::vec(any_pattern(), 1..=3),
        any_window(),
        prop::bool::ANY,
    )
        .prop_map(|(fluent, init, patterns, window, single_window)| Rule {
            kind: if init { RuleKind::Initiates } else { RuleKind::Terminates },
            fluent,
            // a single pattern may still carry a window
            window: (patterns.len() > 1 || single_window).then_some(window),
            patterns,
        })
}

/// Any well-formed rule set: every rule names a declared fluent and every
/// fluent has an initiate rule.
pub fn any_ruleset() -> impl Strategy<Value = RuleSet> {
    prop::collection::btree_set(ident(), 1..=4)
        .prop_flat_map(|fluents| {
            let names: Vec<String> = fluents.iter().cloned().collect();
            let inits: Vec<_> = names
                .iter()
                .map(|f| {
                    let f = f.clone();
                    any_rule(vec![f]).prop_map(|mut r| {
                        r.kind = RuleKind::Initiates;
                        r
                    })
                })
                .collect();
            (Just(fluents), inits, prop::collection::vec(any_rule(names), 0..=6))
        })
        .prop_flat_map(|(fluents, inits, extra)| {
            let mut rules = inits;
            rules.extend(extra);
            (Just(fluents), Just(rules).prop_shuffle())
        })
        .prop_map(|(fluents, rules)| RuleSet { fluents, rules })
}

/// Re-spaces formatted rule text and sprinkles comments between tokens.
pub fn respace(text: &str) -> impl Strategy<Value = String> {
    let gaps = text.matches(' ').count() + text.matches('\n').count();
    let pieces = prop::collection::vec(
        prop::sample::select(vec![" ", "  ", "\t", "\n", " \n  ", " # note\n", "\n# a comment line\n\n"]),
        gaps,
    );
    let text = text.to_string();
    (pieces, prop::sample::select(vec!["", "# header\n", "\n\n"])).prop_map(move |(pieces, head)| {
        let mut out = String::from(head);
        let mut it = pieces.into_iter();
        for ch in text.chars() {
            if ch == ' ' || ch == '\n' {
                out.push_str(it.next().unwrap());
            } else {
                out.push(ch);
            }
        }
        out
    })
}
