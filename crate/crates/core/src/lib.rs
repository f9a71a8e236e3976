//! Core of the situational understanding engine.
//!
//! Everything here is pure and allocation-only: the domain model shared by
//! producers and consoles, the `.sue-rules` language, the probabilistic
//! event-calculus engine with its possible-worlds oracle, run analytics, and
//! the deterministic command interpreter. IO, transport and file formats
//! live in the `sue-gateway` crate.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod analytics;
pub mod cui;
pub mod engine;
mod error;
pub mod model;
pub mod rules;

pub use error::Error;

/// Milliseconds since the Unix epoch.
pub type Millis = i64;
