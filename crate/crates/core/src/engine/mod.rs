//! Probabilistic event-calculus reasoning over discrete ticks.
//!
//! A fluent's probability evolves as `P' = I + (1 - I) * P * (1 - T)`, with
//! `I` and `T` the probabilities that at least one initiating or terminating
//! grounding occurs in the tick. Under independent events and groundings
//! that share no events this is exactly the possible-worlds semantics
//! implemented by [`exact_holds_probability`].

mod grounding;
mod oracle;
mod stream;
mod tick;
mod update;

pub use grounding::{find_groundings, Grounding};
pub use oracle::{exact_holds_probability, exact_holds_series, ORACLE_MAX_EVENTS};
pub use stream::{Engine, EngineConfig, EngineOutput, Rejection};
pub use tick::{Tick, TickClock, DEFAULT_TICK_MS};
pub use update::{
    any_occurs, tick_update, update_probability, FiredGrounding, FluentHistoryEntry, FluentState,
    ProofTrace,
};
