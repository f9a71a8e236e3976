//! Query-side summaries over a run: counts, bucketed timelines and
//! per-event detail views.
//!
//! All ranges are half-open `[start, end)`. Complex events are counted at
//! their activation time, keyed by fluent name, under their peak level.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::engine::{EngineOutput, ProofTrace};
use crate::model::{
    classify_belief, BeliefLevel, BeliefThresholds, ComplexEvent, Sensor, SensorRegistry,
    SimpleEvent,
};
use crate::{Error, Millis};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimeRange {
    pub start: Millis,
    pub end: Millis,
}

impl TimeRange {
    pub fn new(start: Millis, end: Millis) -> Result<Self, Error> {
        if start > end {
            return Err(Error::InvalidRange { start, end });
        }
        Ok(TimeRange { start, end })
    }

    pub fn contains(&self, t: Millis) -> bool {
        self.start <= t && t < self.end
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub total: u64,
    pub by_type: BTreeMap<String, u64>,
    pub by_level: BTreeMap<BeliefLevel, u64>,
    pub by_owner: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimelineBucket {
    pub start_ms: Millis,
    pub width_ms: Millis,
    pub counts: BTreeMap<String, u64>,
}

impl TimelineBucket {
    pub fn total(&self) -> u64 {
        self.counts.values().sum()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EventDetail {
    Simple {
        event: SimpleEvent,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sensor: Option<Sensor>,
    },
    Complex {
        event: ComplexEvent,
        /// Ordered by time, ties by id.
        constituents: Vec<SimpleEvent>,
        /// One trace per entry of the event's probability history.
        traces: Vec<ProofTrace>,
    },
}

#[derive(Debug, Clone)]
struct ComplexRecord {
    event: ComplexEvent,
    peak: BeliefLevel,
    traces: Vec<ProofTrace>,
}

impl ComplexRecord {
    fn push_trace(&mut self, trace: &ProofTrace) {
        if self.traces.last().is_none_or(|t| t.tick < trace.tick) {
            self.traces.push(trace.clone());
        }
    }
}

/// Everything observed during one run, indexed for queries.
#[derive(Debug, Clone, Default)]
pub struct RunStore {
    thresholds: BeliefThresholds,
    sensors: SensorRegistry,
    simple: Vec<SimpleEvent>,
    simple_index: BTreeMap<String, usize>,
    complex: BTreeMap<String, ComplexRecord>,
    active_by_fluent: BTreeMap<String, String>,
}

impl RunStore {
    pub fn new(thresholds: BeliefThresholds) -> Self {
        RunStore { thresholds, ..Default::default() }
    }

    pub fn sensors(&self) -> &SensorRegistry {
        &self.sensors
    }

    pub fn register_sensor(&mut self, sensor: Sensor) {
        self.sensors.register(sensor);
    }

    /// Records an accepted simple event. The first event with an id wins.
    pub fn record_simple(&mut self, event: SimpleEvent) -> bool {
        if self.simple_index.contains_key(&event.id) {
            return false;
        }
        self.simple_index.insert(event.id.clone(), self.simple.len());
        self.simple.push(event);
        true
    }

    pub fn record_output(&mut self, output: &EngineOutput) {
        match output {
            EngineOutput::Trace(trace) => {
                if let Some(id) = self.active_by_fluent.get(&trace.fluent) {
                    if let Some(rec) = self.complex.get_mut(id) {
                        rec.push_trace(trace);
                    }
                }
            }
            EngineOutput::Complex(event) => {
                let rec = self.complex.entry(event.id.clone()).or_insert_with(|| ComplexRecord {
                    event: event.clone(),
                    peak: event.belief,
                    traces: Vec::new(),
                });
                rec.event = event.clone();
                rec.peak = rec.peak.max(event.belief);
                rec.push_trace(&event.trace);
                if event.is_closed() {
                    self.active_by_fluent.remove(&event.fluent);
                } else {
                    self.active_by_fluent.insert(event.fluent.clone(), event.id.clone());
                }
            }
        }
    }

    pub fn simple_events(&self) -> &[SimpleEvent] {
        &self.simple
    }

    pub fn complex_events(&self) -> impl Iterator<Item = &ComplexEvent> {
        self.complex.values().map(|r| &r.event)
    }

    pub fn simple_event(&self, id: &str) -> Option<&SimpleEvent> {
        self.simple_index.get(id).map(|&i| &self.simple[i])
    }

    pub fn complex_event(&self, id: &str) -> Option<&ComplexEvent> {
        self.complex.get(id).map(|r| &r.event)
    }

    fn simple_level(&self, e: &SimpleEvent) -> BeliefLevel {
        classify_belief(e.confidence, &self.thresholds).unwrap_or(BeliefLevel::NotSignificant)
    }

    /// Keyed occurrences in range: `(time, key)` per simple and complex event.
    fn occurrences(&self, range: TimeRange) -> impl Iterator<Item = (Millis, &str)> + '_ {
        let simple = self
            .simple
            .iter()
            .filter(move |e| range.contains(e.time))
            .map(|e| (e.time, e.event_type.as_str()));
        let complex = self
            .complex
            .values()
            .filter(move |r| range.contains(r.event.active_since))
            .map(|r| (r.event.active_since, r.event.fluent.as_str()));
        simple.chain(complex)
    }

    pub fn summary(&self, start: Millis, end: Millis) -> Result<Summary, Error> {
        let range = TimeRange::new(start, end)?;
        let mut by_type = BTreeMap::new();
        let mut by_level: BTreeMap<BeliefLevel, u64> = BeliefLevel::ALL.iter().map(|&l| (l, 0)).collect();
        let mut by_owner = BTreeMap::new();
        let mut total = 0;
        for (_, key) in self.occurrences(range) {
            total += 1;
            *by_type.entry(String::from(key)).or_insert(0) += 1;
        }
        for e in self.simple.iter().filter(|e| range.contains(e.time)) {
            *by_level.entry(self.simple_level(e)).or_insert(0) += 1;
            if let Some(s) = self.sensors.get(&e.sensor_id) {
                *by_owner.entry(String::from(s.owner.as_str())).or_insert(0) += 1;
            }
        }
        for r in self.complex.values().filter(|r| range.contains(r.event.active_since)) {
            *by_level.entry(r.peak).or_insert(0) += 1;
        }
        Ok(Summary { total, by_type, by_level, by_owner })
    }

    /// `ceil((end - start) / width)` buckets; the last one may be partial.
    pub fn timeline(&self, start: Millis, end: Millis, width_ms: Millis) -> Result<Vec<TimelineBucket>, Error> {
        let range = TimeRange::new(start, end)?;
        if width_ms <= 0 {
            return Err(Error::InvalidBucketWidth(width_ms));
        }
        let span = end - start;
        let n = (span + width_ms - 1) / width_ms;
        let mut buckets: Vec<TimelineBucket> = (0..n)
            .map(|i| {
                let s = start + i * width_ms;
                TimelineBucket { start_ms: s, width_ms: width_ms.min(end - s), counts: BTreeMap::new() }
            })
            .collect();
        for (t, key) in self.occurrences(range) {
            let b = ((t - start) / width_ms) as usize;
            *buckets[b].counts.entry(String::from(key)).or_insert(0) += 1;
        }
        Ok(buckets)
    }

    pub fn event_detail(&self, id: &str) -> Result<EventDetail, Error> {
        if let Some(e) = self.simple_event(id) {
            return Ok(EventDetail::Simple {
                event: e.clone(),
                sensor: self.sensors.get(&e.sensor_id).cloned(),
            });
        }
        if let Some(rec) = self.complex.get(id) {
            let mut constituents: Vec<SimpleEvent> = rec
                .event
                .constituents
                .iter()
                .filter_map(|c| self.simple_event(c).cloned())
                .collect();
            constituents.sort_by(|a, b| a.time.cmp(&b.time).then_with(|| a.id.cmp(&b.id)));
            return Ok(EventDetail::Complex {
                event: rec.event.clone(),
                constituents,
                traces: rec.traces.clone(),
            });
        }
        Err(Error::NotFound(String::from(id)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::test_support::{ev, shooting_rules};
    use crate::engine::{Engine, EngineConfig};
    use crate::model::test_support::sensor;

    fn store_with(events: &[SimpleEvent]) -> RunStore {
        let mut s = RunStore::new(BeliefThresholds::default());
        s.register_sensor(sensor("cam-1", "UK"));
        for e in events {
            s.record_simple(e.clone());
        }
        s
    }

    #[test]
    fn empty_run_is_all_zero() {
        let s = RunStore::new(BeliefThresholds::default());
        let sum = s.summary(0, 10_000).unwrap();
        assert_eq!(sum.total, 0);
        assert!(sum.by_type.is_empty() && sum.by_owner.is_empty());
        assert_eq!(sum.by_level.len(), 4);
        assert!(sum.by_level.values().all(|&c| c == 0));
    }

    #[test]
    fn counts_by_type_and_owner() {
        let s = store_with(&[
            ev("g1", "gunshot", 100, 0.0, 0.9),
            ev("g2", "gunshot", 200, 0.0, 0.6),
            ev("g3", "gunshot", 300, 0.0, 0.3),
            ev("c1", "all_clear", 400, 0.0, 0.1),
        ]);
        let sum = s.summary(0, 1_000).unwrap();
        assert_eq!(sum.total, 4);
        assert_eq!(sum.by_type.get("gunshot"), Some(&3));
        assert_eq!(sum.by_type.get("all_clear"), Some(&1));
        assert_eq!(sum.by_owner.get("UK"), Some(&4));
        assert_eq!(sum.by_level[&BeliefLevel::Strong], 1);
        assert_eq!(sum.by_level[&BeliefLevel::Medium], 1);
        assert_eq!(sum.by_level[&BeliefLevel::Weak], 1);
        assert_eq!(sum.by_level[&BeliefLevel::NotSignificant], 1);
    }

    #[test]
    fn end_is_exclusive() {
        let s = store_with(&[ev("g1", "gunshot", 1_000, 0.0, 0.9)]);
        assert_eq!(s.summary(0, 1_000).unwrap().total, 0);
        assert_eq!(s.summary(1_000, 1_001).unwrap().total, 1);
    }

    #[test]
    fn rejects_bad_ranges() {
        let s = RunStore::default();
        assert_eq!(s.summary(10, 5), Err(Error::InvalidRange { start: 10, end: 5 }));
        assert_eq!(s.timeline(0, 10, 0), Err(Error::InvalidBucketWidth(0)));
        assert!(s.timeline(0, 10, -3).is_err());
    }

    #[test]
    fn partial_last_bucket() {
        let s = store_with(&[ev("g1", "gunshot", 9_500, 0.0, 0.9)]);
        let buckets = s.timeline(0, 10_000, 3_000).unwrap();
        assert_eq!(buckets.len(), 4);
        assert_eq!(buckets[3].start_ms, 9_000);
        assert_eq!(buckets[3].width_ms, 1_000);
        assert_eq!(buckets[3].counts.get("gunshot"), Some(&1));
        let total: u64 = buckets.iter().map(TimelineBucket::total).sum();
        assert_eq!(total, 1);
    }

    #[test]
    fn unknown_id() {
        let s = RunStore::default();
        assert_eq!(s.event_detail("nope"), Err(Error::NotFound("nope".into())));
    }

    #[test]
    fn complex_detail_from_the_shooting_run() {
        let mut store = store_with(&[]);
        let mut engine = Engine::new(shooting_rules(), EngineConfig::default()).unwrap();
        let events = [
            ev("w1", "weapon_sighting", 15_000, 50.0, 0.8),
            ev("g1", "gunshot", 5_000, 0.0, 0.9),
        ];
        for e in events {
            store.record_simple(e.clone());
            engine.ingest(e).unwrap();
        }
        for out in engine.advance(20).unwrap() {
            store.record_output(&out);
        }
        let id = engine.active_complex_events().next().unwrap().id.clone();
        match store.event_detail(&id).unwrap() {
            EventDetail::Complex { event, constituents, traces } => {
                let ids: Vec<&str> = constituents.iter().map(|e| e.id.as_str()).collect();
                assert_eq!(ids, ["g1", "w1"]);
                assert!((event.trace.prob_after - 0.72).abs() < 1e-12);
                assert_eq!(traces.len(), event.history.len());
                for (t, h) in traces.iter().zip(&event.history) {
                    assert!(t.is_consistent());
                    assert_eq!(t.prob_after, h.probability);
                }
            }
            other => panic!("unexpected detail {other:?}"),
        }
        let sum = store.summary(0, 60_000).unwrap();
        assert_eq!(sum.total, 3);
        assert_eq!(sum.by_type.get("shooting"), Some(&1));
    }
}
