//! WebSocket endpoints: `/ingest` for producers, `/console` for analysts.

use std::sync::{Arc, Mutex};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use axum::routing::get;
use axum::Router;
use futures::stream::SplitSink;
use futures::{SinkExt, StreamExt};
use sue_core::cui::Session;
use tokio::sync::oneshot;

use crate::hub::Hub;
use crate::protocol::{decode, AckPayload, ControlRequest, EnvelopeType, ErrorPayload, Outbox, SeqTracker};
use crate::service::Service;

pub type SharedService = Arc<Mutex<Service>>;

#[derive(Clone)]
pub struct AppState {
    pub service: SharedService,
    pub hub: Arc<Hub>,
}

impl AppState {
    pub fn new(service: Service) -> Self {
        let hub = Arc::clone(service.hub());
        AppState { service: Arc::new(Mutex::new(service)), hub }
    }
}

pub fn now_ms() -> i64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as i64).unwrap_or(0)
}

fn reply(outbox: &mut Outbox, time_ms: i64, result: Result<AckPayload, ErrorPayload>) -> String {
    match result {
        Ok(ack) => outbox.stamp_value(EnvelopeType::Ack, time_ms, &ack),
        Err(err) => outbox.stamp_value(EnvelopeType::Error, time_ms, &err),
    }
}

/// Protocol state of one producer connection.
pub struct IngestConnection {
    service: SharedService,
    seq: SeqTracker,
    outbox: Outbox,
}

impl IngestConnection {
    pub fn new(service: SharedService) -> Self {
        IngestConnection { service, seq: SeqTracker::default(), outbox: Outbox::default() }
    }

    /// Exactly one ack or error frame per inbound frame.
    pub fn handle_text(&mut self, text: &str) -> String {
        let mut svc = self.service.lock().unwrap();
        let result = decode(text).and_then(|env| {
            self.seq.check(env.seq)?;
            let result = svc.ingest(&env)?;
            Ok(AckPayload { seq: env.seq, result })
        });
        reply(&mut self.outbox, svc.position_ms(), result)
    }

    pub fn handle_binary(&mut self) -> String {
        let time = self.service.lock().unwrap().position_ms();
        reply(&mut self.outbox, time, Err(ErrorPayload::new(None, "binary frames are not supported")))
    }
}

/// Protocol and view state of one console connection.
pub struct ConsoleConnection {
    service: SharedService,
    seq: SeqTracker,
    pub outbox: Outbox,
    pub session: Session,
}

impl ConsoleConnection {
    pub fn new(service: SharedService) -> Self {
        ConsoleConnection { service, seq: SeqTracker::default(), outbox: Outbox::default(), session: Session::default() }
    }

    pub fn handle_text(&mut self, text: &str) -> String {
        let mut svc = self.service.lock().unwrap();
        let session = &mut self.session;
        let result = decode(text).and_then(|env| {
            self.seq.check(env.seq)?;
            let seq = Some(env.seq);
            if env.kind != EnvelopeType::Control {
                return Err(ErrorPayload::new(
                    seq,
                    format!("envelope type '{}' is not accepted on /console", env.kind.as_str()),
                ));
            }
            let req: ControlRequest = serde_json::from_value(env.payload)
                .map_err(|e| ErrorPayload::new(seq, format!("invalid control request: {e}")))?;
            let result = svc.control(&req, Some(session)).map_err(|mut e| {
                e.seq = seq;
                e
            })?;
            Ok(AckPayload { seq: env.seq, result: Some(result) })
        });
        reply(&mut self.outbox, svc.position_ms(), result)
    }

    pub fn handle_binary(&mut self) -> String {
        let time = self.service.lock().unwrap().position_ms();
        reply(&mut self.outbox, time, Err(ErrorPayload::new(None, "binary frames are not supported")))
    }
}

pub fn router(state: AppState) -> Router {
    Router::new()
        .route("/ingest", get(ingest_upgrade))
        .route("/console", get(console_upgrade))
        .route("/health", get(|| async { "ok" }))
        .with_state(state)
}

async fn ingest_upgrade(ws: WebSocketUpgrade, State(state): State<AppState>) -> Response {
    ws.on_upgrade(move |socket| ingest_socket(socket, state))
}

async fn console_upgrade(ws: WebSocketUpgrade, State(state): State<AppState>) -> Response {
    ws.on_upgrade(move |socket| console_socket(socket, state))
}

async fn ingest_socket(mut socket: WebSocket, state: AppState) {
    let mut conn = IngestConnection::new(state.service);
    while let Some(Ok(msg)) = socket.recv().await {
        let out = match msg {
            Message::Text(text) => conn.handle_text(text.as_str()),
            Message::Binary(_) => conn.handle_binary(),
            Message::Close(_) => break,
            Message::Ping(_) | Message::Pong(_) => continue,
        };
        if socket.send(Message::Text(out.into())).await.is_err() {
            break;
        }
    }
}

async fn console_socket(socket: WebSocket, state: AppState) {
    let mut conn = ConsoleConnection::new(Arc::clone(&state.service));
    // Subscribing and snapshotting under the service lock means no
    // broadcast is missed or seen twice.
    let (mut sub, snapshot) = {
        let svc = state.service.lock().unwrap();
        let sub = state.hub.subscribe();
        let snap = svc.snapshot(&conn.session);
        (sub, conn.outbox.stamp_value(EnvelopeType::Control, svc.position_ms(), &snap))
    };
    let (mut tx, mut rx) = socket.split();
    let kicked = &mut sub.kicked;
    let mut open = send_unless_kicked(&mut tx, kicked, snapshot).await;
    while open {
        tokio::select! {
            biased;
            _ = &mut *kicked => break,
            out = sub.rx.recv() => match out {
                Some(out) => {
                    let frame = out.stamp(&mut conn.outbox);
                    open = send_unless_kicked(&mut tx, kicked, frame).await;
                }
                None => break,
            },
            msg = rx.next() => {
                let frame = match msg {
                    Some(Ok(Message::Text(text))) => conn.handle_text(text.as_str()),
                    Some(Ok(Message::Binary(_))) => conn.handle_binary(),
                    Some(Ok(Message::Ping(_) | Message::Pong(_))) => continue,
                    Some(Ok(Message::Close(_)) | Err(_)) | None => break,
                };
                open = send_unless_kicked(&mut tx, kicked, frame).await;
            }
        }
    }
    state.hub.unsubscribe(sub.id);
    let _ = tx.close().await;
}

/// Sends a frame unless the hub drops the subscriber first, which a
/// stalled client would otherwise block forever.
async fn send_unless_kicked(
    tx: &mut SplitSink<WebSocket, Message>,
    kicked: &mut oneshot::Receiver<()>,
    frame: String,
) -> bool {
    tokio::select! {
        biased;
        _ = kicked => false,
        r = tx.send(Message::Text(frame.into())) => r.is_ok(),
    }
}

/// Live mode: drives the engine from the wall clock.
pub fn spawn_ticker(service: SharedService, tick_ms: i64) -> tokio::task::JoinHandle<()> {
    tokio::spawn(async move {
        let mut interval = tokio::time::interval(Duration::from_millis(tick_ms.max(1) as u64));
        interval.set_missed_tick_behavior(tokio::time::MissedTickBehavior::Delay);
        loop {
            interval.tick().await;
            service.lock().unwrap().advance_to(now_ms());
        }
    })
}
