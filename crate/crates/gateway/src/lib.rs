//! Service boundary for the situational understanding engine: WebSocket
//! ingestion and console fan-out, scenario files and replay.

pub mod cli;
pub mod hub;
pub mod protocol;
pub mod replay;
pub mod scenario;
pub mod server;
pub mod service;
