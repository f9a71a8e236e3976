use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use super::{Sensor, SimpleEvent};

/// Sensors known to a deployment, keyed by id.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SensorRegistry {
    sensors: BTreeMap<String, Sensor>,
}

impl SensorRegistry {
    pub fn new() -> Self {
        Self::default()
    }

    /// Registers or replaces a sensor. Returns the previous entry.
    pub fn register(&mut self, sensor: Sensor) -> Option<Sensor> {
        self.sensors.insert(sensor.id.clone(), sensor)
    }

    pub fn get(&self, id: &str) -> Option<&Sensor> {
        self.sensors.get(id)
    }

    pub fn contains(&self, id: &str) -> bool {
        self.sensors.contains_key(id)
    }

    pub fn len(&self) -> usize {
        self.sensors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sensors.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Sensor> {
        self.sensors.values()
    }
}

/// A broken [`SimpleEvent`] invariant.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    MissingId,
    MissingEventType,
    UnregisteredSensor(String),
    ConfidenceOutOfRange(f64),
    NegativeRadius(f64),
    MalformedCoordinates,
    UncertaintyOutOfRange,
    InvalidExplanation(&'static str),
}

impl Violation {
    pub fn message(&self) -> &'static str {
        match self {
            Violation::MissingId => "missing event id",
            Violation::MissingEventType => "missing event type",
            Violation::UnregisteredSensor(_) => "unregistered sensor",
            Violation::ConfidenceOutOfRange(_) => "confidence out of range",
            Violation::NegativeRadius(_) => "negative region radius",
            Violation::MalformedCoordinates => "malformed coordinates",
            Violation::UncertaintyOutOfRange => "uncertainty out of range",
            Violation::InvalidExplanation(why) => why,
        }
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.message())
    }
}

/// Checks every invariant of `event` against the registry and reports all
/// violations at once.
pub fn validate_event(event: &SimpleEvent, registry: &SensorRegistry) -> Result<(), Vec<Violation>> {
    let mut out = Vec::new();
    if event.id.is_empty() {
        out.push(Violation::MissingId);
    }
    if event.event_type.is_empty() {
        out.push(Violation::MissingEventType);
    }
    if !registry.contains(&event.sensor_id) {
        out.push(Violation::UnregisteredSensor(event.sensor_id.clone()));
    }
    if !(0.0..=1.0).contains(&event.confidence) {
        out.push(Violation::ConfidenceOutOfRange(event.confidence));
    }
    if !(event.region_radius_m >= 0.0 && event.region_radius_m.is_finite()) {
        out.push(Violation::NegativeRadius(event.region_radius_m));
    }
    if !event.position.is_valid() {
        out.push(Violation::MalformedCoordinates);
    }
    if let Some(u) = event.uncertainty {
        if !((0.0..=1.0).contains(&u.aleatoric) && (0.0..=1.0).contains(&u.epistemic)) {
            out.push(Violation::UncertaintyOutOfRange);
        }
    }
    if let Some(why) = event.explanation.as_ref().and_then(|e| e.check()) {
        out.push(Violation::InvalidExplanation(why));
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}
