use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use super::{BeliefLevel, GeoPoint};
use crate::engine::ProofTrace;
use crate::{Error, Millis};

/// Coalition partner code such as `US` or `UK`: 2 to 8 ASCII uppercase letters.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct PartnerId(String);

impl PartnerId {
    pub fn new(code: impl Into<String>) -> Result<Self, Error> {
        let code = code.into();
        let ok = (2..=8).contains(&code.len()) && code.bytes().all(|b| b.is_ascii_uppercase());
        if ok {
            Ok(PartnerId(code))
        } else {
            Err(Error::InvalidPartnerId(code))
        }
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for PartnerId {
    type Error = Error;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        PartnerId::new(value)
    }
}

impl From<PartnerId> for String {
    fn from(p: PartnerId) -> String {
        p.0
    }
}

impl fmt::Display for PartnerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SensorKind {
    Camera,
    Microphone,
    Other(String),
}

/// A coalition-owned, typed, geolocated data source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sensor {
    pub id: String,
    pub kind: SensorKind,
    pub owner: PartnerId,
    pub position: GeoPoint,
    #[serde(default)]
    pub label: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Video,
    Audio,
    Multimodal,
    Other,
}

impl Modality {
    pub fn as_str(self) -> &'static str {
        match self {
            Modality::Video => "video",
            Modality::Audio => "audio",
            Modality::Multimodal => "multimodal",
            Modality::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [Modality::Video, Modality::Audio, Modality::Multimodal, Modality::Other]
            .into_iter()
            .find(|m| m.as_str() == s)
    }
}

/// Detector-reported uncertainty split; carried through untouched.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Uncertainty {
    pub aleatoric: f64,
    pub epistemic: f64,
}

/// A detection produced by a single sensor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimpleEvent {
    pub id: String,
    pub event_type: String,
    pub sensor_id: String,
    pub time: Millis,
    pub position: GeoPoint,
    pub region_radius_m: f64,
    pub confidence: f64,
    pub modality: Modality,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uncertainty: Option<Uncertainty>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub explanation: Option<ExplanationPayload>,
}

/// Modalities a saliency explanation can single out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SaliencyModality {
    Video,
    Audio,
}

/// One input frame next to its saliency rendering. Media are opaque URIs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SaliencyFrame {
    pub time_offset_ms: Millis,
    pub original_ref: String,
    pub saliency_ref: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TemporalRelevance {
    pub time_offset_ms: Millis,
    pub score: f64,
}

/// Explanation attached to a detection or inference.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ExplanationPayload {
    Saliency {
        dominant_modality: SaliencyModality,
        modality_scores: BTreeMap<SaliencyModality, f64>,
        #[serde(default)]
        frames: Vec<SaliencyFrame>,
        #[serde(default)]
        temporal_relevance: Vec<TemporalRelevance>,
    },
    Symbolic { trace: ProofTrace },
}

impl ExplanationPayload {
    /// Returns a description of the first broken invariant, if any.
    pub fn check(&self) -> Option<&'static str> {
        match self {
            ExplanationPayload::Saliency {
                modality_scores,
                frames,
                temporal_relevance,
                ..
            } => {
                if modality_scores.is_empty() {
                    return Some("saliency explanation without modality scores");
                }
                if modality_scores.values().any(|s| !(s.is_finite() && *s >= 0.0)) {
                    return Some("negative modality score");
                }
                if frames.windows(2).any(|w| w[1].time_offset_ms < w[0].time_offset_ms) {
                    return Some("frame offsets decrease");
                }
                if temporal_relevance.iter().any(|r| !(r.score.is_finite() && r.score >= 0.0)) {
                    return Some("negative temporal relevance score");
                }
                None
            }
            ExplanationPayload::Symbolic { .. } => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbabilityPoint {
    pub time_ms: Millis,
    pub probability: f64,
}

/// A fluent instance inferred from simple events.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexEvent {
    pub id: String,
    pub fluent: String,
    pub probability: f64,
    pub belief: BeliefLevel,
    pub active_since: Millis,
    pub last_update: Millis,
    pub constituents: Vec<String>,
    pub centroid: GeoPoint,
    pub radius_m: f64,
    /// Trace of the most recent update.
    pub trace: ProofTrace,
    pub history: Vec<ProbabilityPoint>,
}

impl ComplexEvent {
    /// A complex event is closed once its belief drops back to not significant.
    pub fn is_closed(&self) -> bool {
        self.belief == BeliefLevel::NotSignificant
    }
}
