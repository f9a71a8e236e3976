//! Scenario replay against a virtual clock.
//!
//! Before entry `k` is delivered the engine is advanced to
//! `epoch + offset_k`, so engine output depends only on the scenario and
//! never on pacing.

use std::sync::Mutex;
use std::time::Duration;

use tokio::time::Instant;

use crate::protocol::ErrorPayload;
use crate::scenario::Scenario;
use crate::service::Service;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pacing {
    /// Virtual milliseconds per wall-clock millisecond.
    Speed(f64),
    /// No delays; order is preserved.
    Fast,
}

impl Pacing {
    pub fn speed(self) -> Option<f64> {
        match self {
            Pacing::Speed(s) => Some(s),
            Pacing::Fast => None,
        }
    }

    /// Wall-clock delay from replay start until an entry at `offset_ms`.
    pub fn delay(self, offset_ms: i64) -> Duration {
        match self {
            Pacing::Speed(s) => Duration::from_secs_f64(offset_ms.max(0) as f64 / 1_000.0 / s),
            Pacing::Fast => Duration::ZERO,
        }
    }
}

#[derive(Debug, Default)]
pub struct ReplayReport {
    /// Wall-clock time of each delivery, measured from replay start.
    pub deliveries: Vec<Duration>,
    /// Entries the service refused, by scenario line.
    pub rejected: Vec<(usize, ErrorPayload)>,
}

pub async fn replay(scenario: &Scenario, pacing: Pacing, service: &Mutex<Service>) -> ReplayReport {
    if let Pacing::Speed(s) = pacing {
        assert!(s > 0.0 && s.is_finite(), "replay speed must be positive");
    }
    let start = Instant::now();
    let mut report = ReplayReport::default();
    for entry in &scenario.entries {
        match pacing {
            Pacing::Speed(_) => tokio::time::sleep_until(start + pacing.delay(entry.offset_ms)).await,
            Pacing::Fast => tokio::task::yield_now().await,
        }
        let mut svc = service.lock().unwrap();
        svc.advance_to(scenario.epoch_ms + entry.offset_ms);
        if let Err(e) = svc.apply_item(&entry.item) {
            tracing::warn!(line = entry.line, error = %e.message, "scenario entry rejected");
            report.rejected.push((entry.line, e));
        }
        report.deliveries.push(start.elapsed());
    }
    service.lock().unwrap().flush();
    report
}
