//! The single writer: sensor registry, engine and run store behind one
//! lock. Lock order is queue order, so every producer sees one sequence.

use std::sync::Arc;

use serde::Serialize;
use serde_json::{json, Value};
use sue_core::analytics::RunStore;
use sue_core::cui::{execute, interpret, Session};
use sue_core::engine::{Engine, EngineConfig, EngineOutput, DEFAULT_TICK_MS};
use sue_core::model::{validate_event, BeliefThresholds, Sensor, SensorRegistry, SimpleEvent};
use sue_core::rules::{parse_rules, RuleSet};

use crate::hub::{Hub, Outbound};
use crate::protocol::{ClockPayload, ControlRequest, Envelope, EnvelopeType, ErrorPayload, Mode, Query, Snapshot};
use crate::scenario::ScenarioItem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ServiceConfig {
    pub mode: Mode,
    pub epoch_ms: i64,
    pub tick_ms: i64,
    pub thresholds: BeliefThresholds,
    /// Replay speed; `None` is as fast as possible or live.
    pub speed: Option<f64>,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            mode: Mode::Live,
            epoch_ms: 0,
            tick_ms: DEFAULT_TICK_MS,
            thresholds: BeliefThresholds::default(),
            speed: None,
        }
    }
}

pub struct Service {
    config: ServiceConfig,
    engine: Engine,
    store: RunStore,
    sensors: SensorRegistry,
    hub: Arc<Hub>,
    position_ms: i64,
}

fn fail(seq: Option<u64>, message: impl Into<String>) -> ErrorPayload {
    ErrorPayload::new(seq, message)
}

impl Service {
    pub fn new(rules: RuleSet, config: ServiceConfig, hub: Arc<Hub>) -> anyhow::Result<Self> {
        let engine = Engine::new(
            rules,
            EngineConfig { epoch_ms: config.epoch_ms, tick_width_ms: config.tick_ms, thresholds: config.thresholds },
        )?;
        Ok(Service {
            config,
            engine,
            store: RunStore::new(config.thresholds),
            sensors: SensorRegistry::default(),
            hub,
            position_ms: config.epoch_ms,
        })
    }

    pub fn mode(&self) -> Mode {
        self.config.mode
    }

    pub fn hub(&self) -> &Arc<Hub> {
        &self.hub
    }

    pub fn engine(&self) -> &Engine {
        &self.engine
    }

    pub fn store(&self) -> &RunStore {
        &self.store
    }

    pub fn position_ms(&self) -> i64 {
        self.position_ms
    }

    pub fn clock(&self) -> ClockPayload {
        ClockPayload {
            mode: self.config.mode,
            speed: self.config.speed,
            position_ms: self.position_ms,
            next_tick: self.engine.next_tick(),
        }
    }

    fn broadcast<T: Serialize>(&self, kind: EnvelopeType, time_ms: i64, payload: &T) {
        self.hub.publish(Outbound::new(kind, time_ms, payload));
    }

    pub fn register_sensor(&mut self, sensor: Sensor) -> Result<(), ErrorPayload> {
        if !sensor.position.is_valid() {
            return Err(fail(None, "malformed coordinates"));
        }
        self.sensors.register(sensor.clone());
        self.store.register_sensor(sensor.clone());
        self.broadcast(EnvelopeType::SensorRegister, self.position_ms, &sensor);
        Ok(())
    }

    pub fn submit_event(&mut self, event: SimpleEvent) -> Result<(), ErrorPayload> {
        if let Err(violations) = validate_event(&event, &self.sensors) {
            let violations: Vec<String> = violations.iter().map(ToString::to_string).collect();
            let mut e = fail(None, violations[0].clone());
            e.violations = violations;
            return Err(e);
        }
        self.engine.ingest(event.clone()).map_err(|r| fail(None, r.to_string()))?;
        self.store.record_simple(event.clone());
        self.broadcast(EnvelopeType::SimpleEvent, event.time, &event);
        Ok(())
    }

    pub fn apply_item(&mut self, item: &ScenarioItem) -> Result<(), ErrorPayload> {
        match item {
            ScenarioItem::Sensor(s) => self.register_sensor(s.clone()),
            ScenarioItem::Event(e) => self.submit_event(e.clone()),
        }
    }

    fn emit(&mut self, outputs: Vec<EngineOutput>) {
        for out in &outputs {
            self.store.record_output(out);
            match out {
                EngineOutput::Trace(t) => {
                    let time = self.engine.clock().tick(t.tick).start_ms;
                    self.broadcast(EnvelopeType::ProofTrace, time, t);
                }
                EngineOutput::Complex(c) => self.broadcast(EnvelopeType::ComplexEvent, c.last_update, c),
            }
        }
    }

    /// Moves the clock to `time_ms` and processes every tick that ended.
    pub fn advance_to(&mut self, time_ms: i64) {
        if time_ms <= self.position_ms {
            return;
        }
        self.position_ms = time_ms;
        let before = self.engine.next_tick();
        let outputs = self.engine.advance_until(time_ms);
        self.emit(outputs);
        if self.engine.next_tick() != before {
            self.broadcast(EnvelopeType::Clock, self.position_ms, &self.clock());
        }
    }

    /// Processes the ticks of every event still pending.
    pub fn flush(&mut self) {
        let before = self.engine.next_tick();
        let outputs = self.engine.flush();
        self.emit(outputs);
        if self.engine.next_tick() != before {
            let end = self.engine.clock().tick(self.engine.next_tick()).start_ms;
            self.position_ms = self.position_ms.max(end);
            self.broadcast(EnvelopeType::Clock, self.position_ms, &self.clock());
        }
    }

    pub fn reload_rules(&mut self, source: &str) -> Result<Value, ErrorPayload> {
        let rules = parse_rules(source).map_err(|diags| {
            let mut e = fail(None, "rule errors");
            e.violations = diags.iter().map(ToString::to_string).collect();
            e
        })?;
        let summary = json!({ "fluents": rules.fluents.len(), "rules": rules.rules.len() });
        self.engine.reload_rules(rules);
        Ok(summary)
    }

    pub fn snapshot(&self, session: &Session) -> Snapshot {
        Snapshot {
            op: "snapshot".into(),
            session: session.clone(),
            clock: self.clock(),
            sensors: self.sensors.iter().cloned().collect(),
            simple_events: self.store.simple_events().to_vec(),
            complex_events: self.store.complex_events().cloned().collect(),
        }
    }

    fn query(&self, q: &Query) -> Result<Value, ErrorPayload> {
        let value = match q {
            Query::Summary { start_ms, end_ms } => {
                serde_json::to_value(self.store.summary(*start_ms, *end_ms).map_err(|e| fail(None, e.to_string()))?)
            }
            Query::Timeline { start_ms, end_ms, width_ms } => serde_json::to_value(
                self.store.timeline(*start_ms, *end_ms, *width_ms).map_err(|e| fail(None, e.to_string()))?,
            ),
            Query::EventDetail { id } => {
                serde_json::to_value(self.store.event_detail(id).map_err(|e| fail(None, e.to_string()))?)
            }
        };
        Ok(value.expect("query results serialize"))
    }

    /// Runs a control request. `session` is present only for consoles.
    pub fn control(&mut self, req: &ControlRequest, session: Option<&mut Session>) -> Result<Value, ErrorPayload> {
        match (req, session) {
            (ControlRequest::Query { query }, _) => self.query(query),
            (ControlRequest::ReloadRules { source }, _) => self.reload_rules(source),
            (ControlRequest::Cui { utterance }, Some(session)) => {
                let reply = execute(&interpret(utterance), session, &self.store);
                Ok(serde_json::to_value(reply).expect("replies serialize"))
            }
            (ControlRequest::Directive { directive }, Some(session)) => {
                session.apply(directive);
                Ok(json!({ "session": session }))
            }
            (ControlRequest::Snapshot, Some(session)) => Ok(serde_json::to_value(self.snapshot(session)).unwrap()),
            (other, None) => Err(fail(None, format!("control op '{}' is only available on /console", other.op()))),
        }
    }

    /// Handles one envelope from a producer.
    pub fn ingest(&mut self, env: &Envelope) -> Result<Option<Value>, ErrorPayload> {
        let seq = Some(env.seq);
        let with_seq = |mut e: ErrorPayload| {
            e.seq = seq;
            e
        };
        if self.config.mode == Mode::Replay {
            return Err(fail(seq, "ingest is disabled in replay mode"));
        }
        match env.kind {
            EnvelopeType::SensorRegister => {
                let sensor: Sensor = serde_json::from_value(env.payload.clone())
                    .map_err(|e| fail(seq, format!("invalid sensor: {e}")))?;
                self.register_sensor(sensor).map_err(with_seq)?;
                Ok(None)
            }
            EnvelopeType::SimpleEvent => {
                let event = parse_event(&env.payload).map_err(|m| fail(seq, m))?;
                self.submit_event(event).map_err(with_seq)?;
                Ok(None)
            }
            EnvelopeType::Control => {
                let req: ControlRequest = serde_json::from_value(env.payload.clone())
                    .map_err(|e| fail(seq, format!("invalid control request: {e}")))?;
                self.control(&req, None).map(Some).map_err(with_seq)
            }
            other => Err(fail(seq, format!("envelope type '{}' is not accepted on /ingest", other.as_str()))),
        }
    }
}

/// Reads an event payload, reporting an out-of-range confidence the same
/// way validation does even when other fields are missing.
fn parse_event(payload: &Value) -> Result<SimpleEvent, String> {
    serde_json::from_value(payload.clone()).map_err(|e| {
        let conf = payload.get("confidence").and_then(Value::as_f64);
        match conf {
            Some(c) if !(0.0..=1.0).contains(&c) => "confidence out of range".to_owned(),
            _ => format!("invalid event: {e}"),
        }
    })
}
