//! Domain types shared by every layer: sensors, detections, belief levels,
//! geometry and explanation payloads.

mod belief;
mod geo;
mod types;
mod validate;

pub use belief::{classify_belief, BeliefLevel, BeliefThresholds, Palette};
pub use geo::{complex_region, great_circle_m, GeoPoint, Region, EARTH_RADIUS_M};
pub use types::{
    ComplexEvent, ExplanationPayload, Modality, PartnerId, ProbabilityPoint, SaliencyFrame,
    SaliencyModality, Sensor, SensorKind, SimpleEvent, TemporalRelevance, Uncertainty,
};
pub use validate::{validate_event, SensorRegistry, Violation};
