use serde::{Deserialize, Serialize};

use crate::{Error, Millis};

/// One slot of the discretised timeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Tick {
    pub index: u64,
    pub start_ms: Millis,
    pub width_ms: Millis,
}

impl Tick {
    pub fn end_ms(&self) -> Millis {
        self.start_ms + self.width_ms
    }

    pub fn contains(&self, t: Millis) -> bool {
        self.start_ms <= t && t < self.end_ms()
    }
}

/// Maps times onto tick indices: tick `k` covers `[epoch + k*w, epoch + (k+1)*w)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TickClock {
    pub epoch_ms: Millis,
    pub width_ms: Millis,
}

pub const DEFAULT_TICK_MS: Millis = 1_000;

impl TickClock {
    pub fn new(epoch_ms: Millis, width_ms: Millis) -> Result<Self, Error> {
        if width_ms <= 0 {
            return Err(Error::InvalidTickWidth(width_ms));
        }
        Ok(TickClock { epoch_ms, width_ms })
    }

    /// Tick index of time `t`, or `None` before the epoch.
    pub fn index_of(&self, t: Millis) -> Option<u64> {
        if t < self.epoch_ms {
            None
        } else {
            Some(((t - self.epoch_ms) / self.width_ms) as u64)
        }
    }

    pub fn tick(&self, index: u64) -> Tick {
        Tick {
            index,
            start_ms: self.epoch_ms + index as Millis * self.width_ms,
            width_ms: self.width_ms,
        }
    }

    pub(crate) fn of_tick(tick: &Tick) -> TickClock {
        TickClock {
            epoch_ms: tick.start_ms - tick.index as Millis * tick.width_ms,
            width_ms: tick.width_ms,
        }
    }
}
