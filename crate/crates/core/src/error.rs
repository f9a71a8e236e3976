use alloc::string::String;
use core::fmt;

/// Errors raised by the pure operations of this crate.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A probability argument outside `[0, 1]` or not finite.
    ProbabilityOutOfRange(f64),
    /// Belief thresholds must satisfy `0 < weak < medium < strong <= 1`.
    InvalidThresholds { strong: f64, medium: f64, weak: f64 },
    InvalidGeoPoint { lat: f64, lon: f64 },
    InvalidPartnerId(String),
    /// A region was requested over zero constituents.
    EmptyRegion,
    /// The engine was asked to move backwards in time.
    ClockRegression { requested: u64, current: u64 },
    /// The exact oracle refuses inputs it cannot enumerate.
    TooManyEvents { count: usize, max: usize },
    InvalidRange { start: i64, end: i64 },
    InvalidBucketWidth(i64),
    InvalidTickWidth(i64),
    NotFound(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ProbabilityOutOfRange(p) => write!(f, "probability {p} out of range [0, 1]"),
            Error::InvalidThresholds { strong, medium, weak } => write!(
                f,
                "belief thresholds must satisfy 0 < weak < medium < strong <= 1 (got {strong},{medium},{weak})"
            ),
            Error::InvalidGeoPoint { lat, lon } => write!(f, "malformed coordinates ({lat}, {lon})"),
            Error::InvalidPartnerId(code) => write!(f, "invalid partner code '{code}'"),
            Error::EmptyRegion => f.write_str("region of an empty constituent list"),
            Error::ClockRegression { requested, current } => write!(
                f,
                "clock regression: requested tick {requested} is before current tick {current}"
            ),
            Error::TooManyEvents { count, max } => {
                write!(f, "refusing to enumerate {count} events (limit {max})")
            }
            Error::InvalidRange { start, end } => write!(f, "inverted time range [{start}, {end})"),
            Error::InvalidBucketWidth(w) => write!(f, "bucket width must be positive (got {w})"),
            Error::InvalidTickWidth(w) => write!(f, "tick width must be positive (got {w})"),
            Error::NotFound(id) => write!(f, "no such event '{id}'"),
        }
    }
}

impl core::error::Error for Error {}
