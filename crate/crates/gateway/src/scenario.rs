//! `.sue.jsonl` scenario files.
//!
//! ```text
//! {"scenario":"shooting","epoch_ms":1700000000000}
//! {"offset_ms":0,"type":"sensor_register","payload":{...Sensor}}
//! {"offset_ms":1000,"type":"simple_event","payload":{...SimpleEvent}}
//! ```
//!
//! The header line is optional and must come first. An event payload
//! without `time` is stamped with `epoch_ms + offset_ms`. Loading is
//! strict: any diagnostic rejects the whole file.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::Serialize;
use serde_json::{Map, Value};
use sue_core::model::{validate_event, Sensor, SensorRegistry, SimpleEvent};

use crate::protocol::{EnvelopeType, PROTOCOL_VERSION};

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioItem {
    Sensor(Sensor),
    Event(SimpleEvent),
}

impl ScenarioItem {
    pub fn kind(&self) -> EnvelopeType {
        match self {
            ScenarioItem::Sensor(_) => EnvelopeType::SensorRegister,
            ScenarioItem::Event(_) => EnvelopeType::SimpleEvent,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioEntry {
    pub line: usize,
    pub offset_ms: i64,
    pub item: ScenarioItem,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub name: String,
    pub epoch_ms: i64,
    pub entries: Vec<ScenarioEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadDiagnostic {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for LoadDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at line {}", self.message, self.line)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("cannot read scenario: {0}")]
    Io(#[from] std::io::Error),
    #[error("{}", render(.0))]
    Invalid(Vec<LoadDiagnostic>),
}

fn render(diags: &[LoadDiagnostic]) -> String {
    diags.iter().map(ToString::to_string).collect::<Vec<_>>().join("\n")
}

impl Scenario {
    pub fn new(name: impl Into<String>, epoch_ms: i64) -> Self {
        Scenario { name: name.into(), epoch_ms, entries: Vec::new() }
    }

    pub fn load(path: &Path) -> Result<Scenario, LoadError> {
        let text = std::fs::read_to_string(path)?;
        let default_name = path
            .file_name()
            .and_then(|n| n.to_str())
            .map(|n| n.trim_end_matches(".sue.jsonl").to_owned())
            .unwrap_or_default();
        parse_scenario(&text, &default_name).map_err(LoadError::Invalid)
    }

    /// Appends an entry; line numbers follow the header line.
    pub fn push(&mut self, offset_ms: i64, item: ScenarioItem) {
        let line = self.entries.len() + 2;
        self.entries.push(ScenarioEntry { line, offset_ms, item });
    }

    pub fn to_jsonl(&self) -> String {
        #[derive(Serialize)]
        struct Header<'a> {
            scenario: &'a str,
            epoch_ms: i64,
        }
        #[derive(Serialize)]
        struct Line<'a, T> {
            offset_ms: i64,
            #[serde(rename = "type")]
            kind: EnvelopeType,
            payload: &'a T,
        }
        let mut out = serde_json::to_string(&Header { scenario: &self.name, epoch_ms: self.epoch_ms }).unwrap();
        out.push('\n');
        for e in &self.entries {
            let line = match &e.item {
                ScenarioItem::Sensor(s) => {
                    serde_json::to_string(&Line { offset_ms: e.offset_ms, kind: e.item.kind(), payload: s })
                }
                ScenarioItem::Event(ev) => {
                    serde_json::to_string(&Line { offset_ms: e.offset_ms, kind: e.item.kind(), payload: ev })
                }
            };
            out.push_str(&line.unwrap());
            out.push('\n');
        }
        out
    }
}

/// Parses and validates scenario text, collecting every diagnostic.
pub fn parse_scenario(text: &str, default_name: &str) -> Result<Scenario, Vec<LoadDiagnostic>> {
    let mut scenario = Scenario::new(default_name, 0);
    let mut diags = Vec::new();
    let mut sensors = SensorRegistry::default();
    let mut event_ids = BTreeSet::new();
    let mut last_offset = 0i64;
    let mut seen_entry = false;
    let mut diag = |line: usize, message: String| diags.push(LoadDiagnostic { line, message });

    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let obj: Map<String, Value> = match serde_json::from_str(raw) {
            Ok(Value::Object(obj)) => obj,
            Ok(_) => {
                diag(line, "expected a json object".into());
                continue;
            }
            Err(e) => {
                diag(line, format!("malformed json ({e})"));
                continue;
            }
        };

        if obj.contains_key("scenario") && !obj.contains_key("type") {
            if seen_entry {
                diag(line, "header must precede all entries".into());
            }
            match (obj.get("scenario").and_then(Value::as_str), obj.get("epoch_ms").and_then(Value::as_i64)) {
                (Some(name), Some(epoch)) => {
                    scenario.name = name.to_owned();
                    scenario.epoch_ms = epoch;
                }
                _ => diag(line, "header needs a 'scenario' name and an integer 'epoch_ms'".into()),
            }
            continue;
        }
        seen_entry = true;

        if let Some(v) = obj.get("v") {
            if v.as_u64() != Some(PROTOCOL_VERSION) {
                diag(line, format!("unsupported protocol version {v}"));
                continue;
            }
        }
        let Some(offset) = obj.get("offset_ms").and_then(Value::as_i64) else {
            diag(line, "missing integer offset_ms".into());
            continue;
        };
        if offset < 0 {
            diag(line, "negative offset".into());
            continue;
        }
        if offset < last_offset {
            diag(line, "non-monotone offset".into());
            continue;
        }
        last_offset = offset;

        let kind = obj.get("type").and_then(Value::as_str).unwrap_or("");
        let mut payload = obj.get("payload").cloned().unwrap_or(Value::Null);
        let item = match kind {
            "sensor_register" => match serde_json::from_value::<Sensor>(payload) {
                Ok(s) if !s.position.is_valid() => {
                    diag(line, "malformed coordinates".into());
                    continue;
                }
                Ok(s) => {
                    sensors.register(s.clone());
                    ScenarioItem::Sensor(s)
                }
                Err(e) => {
                    diag(line, format!("invalid sensor ({e})"));
                    continue;
                }
            },
            "simple_event" => {
                if let Value::Object(p) = &mut payload {
                    p.entry("time").or_insert(Value::from(scenario.epoch_ms + offset));
                }
                let event = match serde_json::from_value::<SimpleEvent>(payload) {
                    Ok(e) => e,
                    Err(e) => {
                        diag(line, format!("invalid event ({e})"));
                        continue;
                    }
                };
                if let Err(violations) = validate_event(&event, &sensors) {
                    for v in violations {
                        diag(line, v.to_string());
                    }
                    continue;
                }
                if !event_ids.insert(event.id.clone()) {
                    diag(line, "duplicate event".into());
                    continue;
                }
                ScenarioItem::Event(event)
            }
            "" => {
                diag(line, "missing entry type".into());
                continue;
            }
            other => {
                diag(line, format!("unsupported entry type '{other}'"));
                continue;
            }
        };
        scenario.entries.push(ScenarioEntry { line, offset_ms: offset, item });
    }

    if diags.is_empty() {
        Ok(scenario)
    } else {
        Err(diags)
    }
}
