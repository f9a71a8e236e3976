#![allow(dead_code)]

use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use futures::{SinkExt, StreamExt};
use serde_json::{json, Value};
use sue_core::rules::{parse_rules, RuleSet};
use sue_gateway::hub::Hub;
use sue_gateway::protocol::{Mode, Outbox};
use sue_gateway::replay::{replay, Pacing};
use sue_gateway::scenario::Scenario;
use sue_gateway::server::{router, AppState};
use sue_gateway::service::{Service, ServiceConfig};
use tokio::net::TcpStream;
use tokio_tungstenite::tungstenite::Message;
use tokio_tungstenite::{connect_async, MaybeTlsStream, WebSocketStream};

pub type Client = WebSocketStream<MaybeTlsStream<TcpStream>>;

pub fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

pub fn shooting_rules() -> RuleSet {
    parse_rules(&std::fs::read_to_string(data("shooting.rules")).unwrap()).unwrap()
}

pub fn shooting_scenario() -> Scenario {
    Scenario::load(&data("shooting.sue.jsonl")).unwrap()
}

pub fn live_service(hub: Arc<Hub>) -> Service {
    Service::new(shooting_rules(), ServiceConfig::default(), hub).unwrap()
}

pub async fn start(service: Service) -> (SocketAddr, AppState) {
    let state = AppState::new(service);
    let listener = tokio::net::TcpListener::bind("127.0.0.1:0").await.unwrap();
    let addr = listener.local_addr().unwrap();
    let app = router(state.clone());
    tokio::spawn(async move { axum::serve(listener, app).await.unwrap() });
    (addr, state)
}

pub async fn connect(addr: SocketAddr, path: &str) -> Client {
    connect_async(format!("ws://{addr}{path}")).await.unwrap().0
}

pub async fn send(c: &mut Client, text: impl Into<String>) {
    c.send(Message::Text(text.into().into())).await.unwrap();
}

/// Next text frame as JSON, or `None` when the stream ends or stalls.
pub async fn next(c: &mut Client) -> Option<Value> {
    loop {
        match tokio::time::timeout(Duration::from_secs(5), c.next()).await.ok()?? {
            Ok(Message::Text(t)) => return Some(serde_json::from_str(t.as_str()).unwrap()),
            Ok(Message::Close(_)) | Err(_) => return None,
            Ok(_) => continue,
        }
    }
}

pub fn envelope(kind: &str, seq: u64, payload: Value) -> String {
    json!({ "v": 1, "type": kind, "seq": seq, "time_ms": 0, "payload": payload }).to_string()
}

pub fn sensor_payload(id: &str, owner: &str) -> Value {
    json!({ "id": id, "kind": "camera", "owner": owner, "position": { "lat": 51.48, "lon": -3.18 } })
}

pub fn event_payload(id: &str, event_type: &str, time: i64, confidence: f64) -> Value {
    json!({
        "id": id, "event_type": event_type, "sensor_id": "cam-1", "time": time,
        "position": { "lat": 51.48, "lon": -3.18 }, "region_radius_m": 10.0,
        "confidence": confidence, "modality": "video"
    })
}

/// Replays in-process and returns every broadcast as the wire text a
/// console connected from the start would receive.
pub async fn transcript(rules: RuleSet, scenario: &Scenario, pacing: Pacing) -> Vec<String> {
    let config = ServiceConfig {
        mode: Mode::Replay,
        epoch_ms: scenario.epoch_ms,
        speed: pacing.speed(),
        ..ServiceConfig::default()
    };
    let hub = Arc::new(Hub::default());
    let mut sub = hub.subscribe_unbounded();
    let service = Mutex::new(Service::new(rules, config, hub).unwrap());
    replay(scenario, pacing, &service).await;
    let mut outbox = Outbox::default();
    std::iter::from_fn(|| sub.rx.try_recv()).map(|o| o.stamp(&mut outbox)).collect()
}

/// Keeps only complex_event and proof_trace envelopes.
pub fn reasoning_only(lines: &[String]) -> Vec<String> {
    lines
        .iter()
        .filter(|l| l.contains(r#""type":"complex_event""#) || l.contains(r#""type":"proof_trace""#))
        .cloned()
        .collect()
}
