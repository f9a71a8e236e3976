//! Fan-out of engine output to console subscribers.

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use serde::Serialize;
use tokio::sync::{mpsc, oneshot};

use crate::protocol::{EnvelopeType, Outbox};

pub const DEFAULT_QUEUE_CAPACITY: usize = 1024;

/// A broadcast before seq stamping; each connection stamps its own seq.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outbound {
    pub kind: EnvelopeType,
    pub time_ms: i64,
    pub payload: String,
}

impl Outbound {
    pub fn new<T: Serialize>(kind: EnvelopeType, time_ms: i64, payload: &T) -> Self {
        let payload = serde_json::to_string(payload).expect("payloads serialize");
        Outbound { kind, time_ms, payload }
    }

    pub fn stamp(&self, outbox: &mut Outbox) -> String {
        outbox.stamp(self.kind, self.time_ms, &self.payload)
    }
}

enum Sink {
    Bounded(mpsc::Sender<Arc<Outbound>>),
    Unbounded(mpsc::UnboundedSender<Arc<Outbound>>),
}

struct Subscriber {
    sink: Sink,
    kick: Option<oneshot::Sender<()>>,
}

pub enum Receiver {
    Bounded(mpsc::Receiver<Arc<Outbound>>),
    Unbounded(mpsc::UnboundedReceiver<Arc<Outbound>>),
}

impl Receiver {
    pub async fn recv(&mut self) -> Option<Arc<Outbound>> {
        match self {
            Receiver::Bounded(rx) => rx.recv().await,
            Receiver::Unbounded(rx) => rx.recv().await,
        }
    }

    pub fn try_recv(&mut self) -> Option<Arc<Outbound>> {
        match self {
            Receiver::Bounded(rx) => rx.try_recv().ok(),
            Receiver::Unbounded(rx) => rx.try_recv().ok(),
        }
    }
}

pub struct Subscription {
    pub id: u64,
    pub rx: Receiver,
    /// Fires when the hub drops this subscriber for falling behind.
    pub kicked: oneshot::Receiver<()>,
}

#[derive(Default)]
struct Inner {
    next_id: u64,
    subscribers: BTreeMap<u64, Subscriber>,
    overflowed: u64,
}

pub struct Hub {
    capacity: usize,
    inner: Mutex<Inner>,
}

impl Default for Hub {
    fn default() -> Self {
        Hub::new(DEFAULT_QUEUE_CAPACITY)
    }
}

impl Hub {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity > 0, "queue capacity must be positive");
        Hub { capacity, inner: Mutex::new(Inner::default()) }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    fn add(&self, sink: Sink, rx: Receiver) -> Subscription {
        let (kick, kicked) = oneshot::channel();
        let mut inner = self.inner.lock().unwrap();
        inner.next_id += 1;
        let id = inner.next_id;
        inner.subscribers.insert(id, Subscriber { sink, kick: Some(kick) });
        Subscription { id, rx, kicked }
    }

    pub fn subscribe(&self) -> Subscription {
        let (tx, rx) = mpsc::channel(self.capacity);
        self.add(Sink::Bounded(tx), Receiver::Bounded(rx))
    }

    /// For in-process consumers such as the CLI printer; never dropped.
    pub fn subscribe_unbounded(&self) -> Subscription {
        let (tx, rx) = mpsc::unbounded_channel();
        self.add(Sink::Unbounded(tx), Receiver::Unbounded(rx))
    }

    pub fn unsubscribe(&self, id: u64) {
        self.inner.lock().unwrap().subscribers.remove(&id);
    }

    pub fn subscriber_count(&self) -> usize {
        self.inner.lock().unwrap().subscribers.len()
    }

    /// Subscribers dropped so far because their queue was full.
    pub fn overflowed(&self) -> u64 {
        self.inner.lock().unwrap().overflowed
    }

    /// Queues `out` for every subscriber without waiting. Returns how many
    /// subscribers received it.
    pub fn publish(&self, out: Outbound) -> usize {
        let out = Arc::new(out);
        let mut inner = self.inner.lock().unwrap();
        let mut dropped = Vec::new();
        for (&id, sub) in &inner.subscribers {
            let ok = match &sub.sink {
                Sink::Bounded(tx) => tx.try_send(Arc::clone(&out)).is_ok(),
                Sink::Unbounded(tx) => tx.send(Arc::clone(&out)).is_ok(),
            };
            if !ok {
                dropped.push(id);
            }
        }
        for id in &dropped {
            if let Some(mut sub) = inner.subscribers.remove(id) {
                let full = matches!(&sub.sink, Sink::Bounded(tx) if !tx.is_closed());
                if full {
                    inner.overflowed += 1;
                    tracing::warn!(subscriber = id, "console queue overflowed, disconnecting");
                }
                if let Some(kick) = sub.kick.take() {
                    let _ = kick.send(());
                }
            }
        }
        inner.subscribers.len()
    }
}
