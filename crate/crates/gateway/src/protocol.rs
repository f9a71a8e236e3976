//! Wire envelopes shared by `/ingest`, `/console` and scenario files.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sue_core::cui::{Session, UiDirective};
use sue_core::model::{ComplexEvent, Sensor, SimpleEvent};

pub const PROTOCOL_VERSION: u64 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EnvelopeType {
    SensorRegister,
    SimpleEvent,
    ComplexEvent,
    ProofTrace,
    Control,
    Ack,
    Error,
    Clock,
}

impl EnvelopeType {
    pub fn as_str(self) -> &'static str {
        match self {
            EnvelopeType::SensorRegister => "sensor_register",
            EnvelopeType::SimpleEvent => "simple_event",
            EnvelopeType::ComplexEvent => "complex_event",
            EnvelopeType::ProofTrace => "proof_trace",
            EnvelopeType::Control => "control",
            EnvelopeType::Ack => "ack",
            EnvelopeType::Error => "error",
            EnvelopeType::Clock => "clock",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        serde_json::from_value(Value::String(s.to_owned())).ok()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub v: u64,
    #[serde(rename = "type")]
    pub kind: EnvelopeType,
    pub seq: u64,
    pub time_ms: i64,
    #[serde(default)]
    pub payload: Value,
}

/// Renders an envelope around an already serialized payload. Field order
/// matches [`Envelope`].
pub fn encode(kind: EnvelopeType, seq: u64, time_ms: i64, payload_json: &str) -> String {
    format!(
        r#"{{"v":{PROTOCOL_VERSION},"type":"{}","seq":{seq},"time_ms":{time_ms},"payload":{payload_json}}}"#,
        kind.as_str()
    )
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AckPayload {
    pub seq: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub result: Option<Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorPayload {
    /// Seq of the offending envelope, when it could be read.
    pub seq: Option<u64>,
    pub message: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub violations: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expected_seq: Option<u64>,
}

impl ErrorPayload {
    pub fn new(seq: Option<u64>, message: impl Into<String>) -> Self {
        ErrorPayload { seq, message: message.into(), violations: Vec::new(), expected_seq: None }
    }
}

/// Why an inbound frame could not be turned into an [`Envelope`].
pub fn decode(text: &str) -> Result<Envelope, ErrorPayload> {
    let value: Value =
        serde_json::from_str(text).map_err(|e| ErrorPayload::new(None, format!("malformed json: {e}")))?;
    let seq = value.get("seq").and_then(Value::as_u64);
    let Some(obj) = value.as_object() else {
        return Err(ErrorPayload::new(None, "envelope must be a json object"));
    };
    match obj.get("v").and_then(Value::as_u64) {
        Some(PROTOCOL_VERSION) => {}
        Some(v) => return Err(ErrorPayload::new(seq, format!("unsupported protocol version {v}"))),
        None => return Err(ErrorPayload::new(seq, "missing protocol version 'v'")),
    }
    match obj.get("type").and_then(Value::as_str) {
        Some(t) if EnvelopeType::parse(t).is_none() => {
            return Err(ErrorPayload::new(seq, format!("unknown envelope type '{t}'")))
        }
        None => return Err(ErrorPayload::new(seq, "missing envelope type")),
        Some(_) => {}
    }
    if seq.is_none() {
        return Err(ErrorPayload::new(None, "missing or invalid seq"));
    }
    serde_json::from_value(value).map_err(|e| ErrorPayload::new(seq, format!("malformed envelope: {e}")))
}

/// Inbound seq discipline: the first envelope is seq 1 and each next one
/// must be exactly one more. A gap is reported and not skipped over.
#[derive(Debug, Clone)]
pub struct SeqTracker {
    expected: u64,
}

impl Default for SeqTracker {
    fn default() -> Self {
        SeqTracker { expected: 1 }
    }
}

impl SeqTracker {
    pub fn expected(&self) -> u64 {
        self.expected
    }

    pub fn check(&mut self, seq: u64) -> Result<(), ErrorPayload> {
        if seq == self.expected {
            self.expected += 1;
            return Ok(());
        }
        let mut e = ErrorPayload::new(Some(seq), format!("sequence gap: expected seq {}", self.expected));
        e.expected_seq = Some(self.expected);
        Err(e)
    }
}

/// Outbound seq stamping for one connection.
#[derive(Debug, Default)]
pub struct Outbox {
    last: u64,
}

impl Outbox {
    pub fn stamp(&mut self, kind: EnvelopeType, time_ms: i64, payload_json: &str) -> String {
        self.last += 1;
        encode(kind, self.last, time_ms, payload_json)
    }

    pub fn stamp_value<T: Serialize>(&mut self, kind: EnvelopeType, time_ms: i64, payload: &T) -> String {
        let json = serde_json::to_string(payload).expect("payloads serialize");
        self.stamp(kind, time_ms, &json)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Query {
    Summary { start_ms: i64, end_ms: i64 },
    Timeline { start_ms: i64, end_ms: i64, width_ms: i64 },
    EventDetail { id: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum ControlRequest {
    Query { query: Query },
    Cui { utterance: String },
    /// A view change made directly on the console, such as a marker click.
    Directive { directive: UiDirective },
    ReloadRules { source: String },
    Snapshot,
}

impl ControlRequest {
    pub fn op(&self) -> &'static str {
        match self {
            ControlRequest::Query { .. } => "query",
            ControlRequest::Cui { .. } => "cui",
            ControlRequest::Directive { .. } => "directive",
            ControlRequest::ReloadRules { .. } => "reload_rules",
            ControlRequest::Snapshot => "snapshot",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Live,
    Replay,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClockPayload {
    pub mode: Mode,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub speed: Option<f64>,
    pub position_ms: i64,
    /// First tick not yet processed.
    pub next_tick: u64,
}

/// Sent to a console on connect and on request, so a reconnecting console
/// can rebuild its view.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Snapshot {
    pub op: String,
    pub session: Session,
    pub clock: ClockPayload,
    pub sensors: Vec<Sensor>,
    pub simple_events: Vec<SimpleEvent>,
    pub complex_events: Vec<ComplexEvent>,
}
