use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::grounding::{ground, Candidate};
use super::{FluentState, ProofTrace, TickClock, DEFAULT_TICK_MS};
use crate::model::{
    classify_belief, complex_region, BeliefLevel, BeliefThresholds, ComplexEvent, ProbabilityPoint,
    SimpleEvent,
};
use crate::rules::{RuleKind, RuleSet};
use crate::{Error, Millis};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EngineConfig {
    pub epoch_ms: Millis,
    pub tick_width_ms: Millis,
    pub thresholds: BeliefThresholds,
}

impl Default for EngineConfig {
    fn default() -> Self {
        EngineConfig {
            epoch_ms: 0,
            tick_width_ms: DEFAULT_TICK_MS,
            thresholds: BeliefThresholds::default(),
        }
    }
}

/// What the engine emits while advancing, in production order.
#[derive(Debug, Clone, PartialEq)]
pub enum EngineOutput {
    /// A fluent update that had at least one grounding.
    Trace(ProofTrace),
    /// A complex event was opened, changed, or closed.
    Complex(ComplexEvent),
}

/// Why an event was refused at ingestion.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rejection {
    Duplicate { id: String },
    /// Older than the eviction horizon.
    Late { id: String, time: Millis, horizon_start: Millis },
    BeforeEpoch { id: String, time: Millis },
}

impl Rejection {
    pub fn event_id(&self) -> &str {
        match self {
            Rejection::Duplicate { id } | Rejection::Late { id, .. } | Rejection::BeforeEpoch { id, .. } => id,
        }
    }
}

impl fmt::Display for Rejection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rejection::Duplicate { .. } => f.write_str("duplicate event"),
            Rejection::Late { id, time, horizon_start } => write!(
                f,
                "late event '{id}': time {time} is before the eviction horizon {horizon_start}"
            ),
            Rejection::BeforeEpoch { id, time } => write!(f, "event '{id}' at {time} precedes the engine epoch"),
        }
    }
}

struct Stored {
    event: SimpleEvent,
    /// Tick the event's groundings may anchor at; later than its own tick
    /// if it arrived after that tick was processed.
    tick: u64,
}

struct FluentRuntime {
    state: FluentState,
    /// Events of fired initiations since the last closure.
    pending: Vec<SimpleEvent>,
    active: Option<ComplexEvent>,
    /// Events already consumed by a grounding of this fluent.
    used: BTreeSet<String>,
    episodes: u64,
}

impl FluentRuntime {
    fn new(fluent: &str, first_tick: u64) -> Self {
        FluentRuntime {
            state: FluentState::new(fluent, first_tick),
            pending: Vec::new(),
            active: None,
            used: BTreeSet::new(),
            episodes: 0,
        }
    }
}

/// Single-writer probabilistic event-calculus engine.
///
/// Events are ingested in any order relative to ticks; `advance` then
/// processes ticks strictly in order. Each grounding fires once, at the
/// tick of its latest event.
pub struct Engine {
    config: EngineConfig,
    clock: TickClock,
    rules: RuleSet,
    next_tick: u64,
    window: Vec<Stored>,
    seen: BTreeSet<String>,
    fluents: BTreeMap<String, FluentRuntime>,
}

impl Engine {
    pub fn new(rules: RuleSet, config: EngineConfig) -> Result<Self, Error> {
        config.thresholds.validate()?;
        let clock = TickClock::new(config.epoch_ms, config.tick_width_ms)?;
        let fluents = rules
            .fluents
            .iter()
            .map(|f| (f.clone(), FluentRuntime::new(f, 0)))
            .collect();
        Ok(Engine {
            config,
            clock,
            rules,
            next_tick: 0,
            window: Vec::new(),
            seen: BTreeSet::new(),
            fluents,
        })
    }

    pub fn config(&self) -> &EngineConfig {
        &self.config
    }

    pub fn clock(&self) -> TickClock {
        self.clock
    }

    pub fn rules(&self) -> &RuleSet {
        &self.rules
    }

    /// Index of the first tick not yet processed.
    pub fn next_tick(&self) -> u64 {
        self.next_tick
    }

    /// Events older than `next tick start - horizon` are rejected as late.
    pub fn horizon_ms(&self) -> Millis {
        self.rules.max_within_ms() as Millis + 2 * self.clock.width_ms
    }

    pub fn window_len(&self) -> usize {
        self.window.len()
    }

    pub fn has_seen(&self, id: &str) -> bool {
        self.seen.contains(id)
    }

    pub fn fluent_state(&self, fluent: &str) -> Option<&FluentState> {
        self.fluents.get(fluent).map(|f| &f.state)
    }

    pub fn fluent_states(&self) -> impl Iterator<Item = &FluentState> {
        self.fluents.values().map(|f| &f.state)
    }

    pub fn active_complex_events(&self) -> impl Iterator<Item = &ComplexEvent> {
        self.fluents.values().filter_map(|f| f.active.as_ref())
    }

    pub fn ingest(&mut self, event: SimpleEvent) -> Result<(), Rejection> {
        if self.seen.contains(&event.id) {
            return Err(Rejection::Duplicate { id: event.id });
        }
        let Some(own_tick) = self.clock.index_of(event.time) else {
            return Err(Rejection::BeforeEpoch { id: event.id, time: event.time });
        };
        let horizon_start = self.clock.tick(self.next_tick).start_ms - self.horizon_ms();
        if event.time < horizon_start {
            return Err(Rejection::Late { id: event.id, time: event.time, horizon_start });
        }
        self.seen.insert(event.id.clone());
        self.window.push(Stored { event, tick: own_tick.max(self.next_tick) });
        Ok(())
    }

    /// Processes every tick up to and including `to_tick`.
    pub fn advance(&mut self, to_tick: u64) -> Result<Vec<EngineOutput>, Error> {
        if to_tick < self.next_tick {
            if to_tick + 1 == self.next_tick {
                return Ok(Vec::new());
            }
            return Err(Error::ClockRegression { requested: to_tick, current: self.next_tick - 1 });
        }
        let mut out = Vec::new();
        while self.next_tick <= to_tick {
            // Ticks without fresh events cannot fire anything.
            let fresh = self.window.iter().map(|s| s.tick).filter(|&t| t >= self.next_tick).min();
            match fresh {
                Some(t) if t <= to_tick => {
                    self.skip_to(t);
                    self.process_tick(&mut out);
                }
                _ => self.skip_to(to_tick + 1),
            }
        }
        Ok(out)
    }

    /// Processes every tick that has fully elapsed at `time_ms`.
    pub fn advance_until(&mut self, time_ms: Millis) -> Vec<EngineOutput> {
        let elapsed = (time_ms - self.clock.epoch_ms).div_euclid(self.clock.width_ms);
        if elapsed < 1 || (elapsed as u64) <= self.next_tick {
            return Vec::new();
        }
        self.advance(elapsed as u64 - 1).unwrap_or_default()
    }

    /// Processes ticks until every ingested event has had its turn.
    pub fn flush(&mut self) -> Vec<EngineOutput> {
        match self.window.iter().map(|s| s.tick).max() {
            Some(last) if last >= self.next_tick => self.advance(last).unwrap_or_default(),
            _ => Vec::new(),
        }
    }

    /// Swaps in a new rule set. Retained fluents keep their state, new ones
    /// start at the next tick, removed ones are dropped with any open
    /// complex event.
    pub fn reload_rules(&mut self, rules: RuleSet) {
        self.fluents.retain(|f, _| rules.fluents.contains(f));
        for f in &rules.fluents {
            if !self.fluents.contains_key(f) {
                let mut rt = FluentRuntime::new(f, self.next_tick);
                rt.state.next_tick = self.next_tick;
                self.fluents.insert(f.clone(), rt);
            }
        }
        self.rules = rules;
    }

    fn skip_to(&mut self, tick: u64) {
        if tick > self.next_tick {
            self.next_tick = tick;
            for rt in self.fluents.values_mut() {
                rt.state.skip_to(tick);
            }
            self.evict();
        }
    }

    fn process_tick(&mut self, out: &mut Vec<EngineOutput>) {
        let t = self.next_tick;
        let tick = self.clock.tick(t);
        let thresholds = self.config.thresholds;
        let Engine { rules, window, fluents, .. } = self;
        let fresh = window.iter().any(|s| s.tick == t);
        let mut candidates: Vec<Candidate<'_>> = if fresh {
            window
                .iter()
                .filter(|s| s.tick <= t)
                .map(|s| Candidate { event: &s.event, tick: s.tick })
                .collect()
        } else {
            Vec::new()
        };
        // Arrival order must not leak into float products or constituent order.
        candidates.sort_by(|a, b| (a.event.time, &a.event.id).cmp(&(b.event.time, &b.event.id)));

        for (fluent, rt) in fluents.iter_mut() {
            let groundings = if fresh {
                ground(rules.rules_for(fluent), &candidates, t)
            } else {
                Vec::new()
            };
            let (inits, terms): (Vec<_>, Vec<_>) =
                groundings.into_iter().partition(|g| g.rule.kind == RuleKind::Initiates);
            if inits.is_empty() && terms.is_empty() {
                rt.state.skip_to(t + 1);
                continue;
            }
            let mut trace = rt.state.apply(&inits, &terms);

            let mut approximate = false;
            let mut this_tick = BTreeSet::new();
            for g in inits.iter().chain(&terms) {
                for e in &g.events {
                    if rt.used.contains(&e.id) || !this_tick.insert(e.id.as_str()) {
                        approximate = true;
                    }
                }
            }
            rt.used.extend(this_tick.into_iter().map(String::from));
            trace.approximate = approximate;

            let mut grew = false;
            for g in &inits {
                for e in &g.events {
                    if !rt.pending.iter().any(|p| p.id == e.id) {
                        rt.pending.push((*e).clone());
                        grew = true;
                    }
                }
            }
            out.push(EngineOutput::Trace(trace.clone()));

            let p = rt.state.prob;
            let level = classify_belief(p, &thresholds).unwrap_or(BeliefLevel::NotSignificant);
            match rt.active.as_mut() {
                None if level > BeliefLevel::NotSignificant => {
                    rt.episodes += 1;
                    let region = complex_region(&rt.pending).ok();
                    let complex = ComplexEvent {
                        id: format!("ce-{fluent}-{}", rt.episodes),
                        fluent: fluent.clone(),
                        probability: p,
                        belief: level,
                        active_since: tick.start_ms,
                        last_update: tick.start_ms,
                        constituents: rt.pending.iter().map(|e| e.id.clone()).collect(),
                        centroid: region.map(|r| r.centroid).unwrap_or(crate::model::GeoPoint { lat: 0.0, lon: 0.0 }),
                        radius_m: region.map(|r| r.radius_m).unwrap_or(0.0),
                        trace,
                        history: alloc::vec![ProbabilityPoint { time_ms: tick.start_ms, probability: p }],
                    };
                    rt.state.active_complex = Some(complex.id.clone());
                    out.push(EngineOutput::Complex(complex.clone()));
                    rt.active = Some(complex);
                }
                None => {}
                Some(complex) => {
                    if grew {
                        complex.constituents = rt.pending.iter().map(|e| e.id.clone()).collect();
                        if let Ok(region) = complex_region(&rt.pending) {
                            complex.centroid = region.centroid;
                            complex.radius_m = complex.radius_m.max(region.radius_m);
                        }
                    }
                    complex.probability = p;
                    complex.belief = level;
                    complex.last_update = tick.start_ms;
                    complex.trace = trace;
                    complex.history.push(ProbabilityPoint { time_ms: tick.start_ms, probability: p });
                    out.push(EngineOutput::Complex(complex.clone()));
                    if level == BeliefLevel::NotSignificant {
                        rt.active = None;
                        rt.state.active_complex = None;
                        rt.pending.clear();
                    }
                }
            }
        }

        self.next_tick += 1;
        self.evict();
    }

    fn evict(&mut self) {
        let keep_from = self.clock.tick(self.next_tick).start_ms
            - self.horizon_ms()
            - self.rules.max_within_ms() as Millis;
        let next = self.next_tick;
        let mut evicted = BTreeSet::new();
        self.window.retain(|s| {
            let keep = s.tick >= next || s.event.time >= keep_from;
            if !keep {
                evicted.insert(s.event.id.clone());
            }
            keep
        });
        if !evicted.is_empty() {
            for rt in self.fluents.values_mut() {
                rt.used.retain(|id| !evicted.contains(id));
            }
        }
    }
}
