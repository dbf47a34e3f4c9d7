//! HTTP/JSON service.
//!
//! Request handlers never touch the ledger directly. Queries take a read
//! lock on the engine; every mutation is sent to one writer thread, which
//! applies it, persists the event and only then answers, so a client that
//! reads after a successful write always sees it.

mod error;
mod routes;
mod session;

use std::io;
use std::sync::mpsc;
use std::sync::{Arc, RwLock, RwLockReadGuard};
use std::thread::JoinHandle;
use std::time::Duration;

use axum::extract::rejection::{JsonRejection, QueryRejection};
use axum::extract::{FromRequest, FromRequestParts, Request};
use axum::http::request::Parts;
use axum::Router;
use serde::de::DeserializeOwned;
use tokio::sync::oneshot;

pub use error::{status_for, ApiError};
pub use session::{Session, SessionStore, DEFAULT_TTL};

use crate::engine::{Engine, EngineError, Receipt, TxRequest};
use crate::ledger::{LedgerState, TransactionEvent};
use crate::store::StateDir;

/// Where applied events go besides memory.
pub trait EventSink: Send + 'static {
    fn persist(&mut self, event: &TransactionEvent, state: &LedgerState) -> io::Result<()>;

    /// Called once when the service shuts down.
    fn finish(&mut self, _state: &LedgerState) -> io::Result<()> {
        Ok(())
    }
}

/// Appends to `txlog.jsonl` and snapshots every `snapshot_every` events.
pub struct DirSink {
    dir: StateDir,
    snapshot_every: u64,
}

impl DirSink {
    pub fn new(dir: StateDir, snapshot_every: u64) -> Self {
        DirSink {
            dir,
            snapshot_every: snapshot_every.max(1),
        }
    }
}

impl EventSink for DirSink {
    fn persist(&mut self, event: &TransactionEvent, state: &LedgerState) -> io::Result<()> {
        self.dir.append(event)?;
        if (event.seq + 1) % self.snapshot_every == 0 {
            self.dir.write_snapshot(state)?;
        }
        Ok(())
    }

    fn finish(&mut self, state: &LedgerState) -> io::Result<()> {
        self.dir.write_snapshot(state).map(drop)
    }
}

#[derive(Debug, Clone)]
pub struct ApiOptions {
    pub admin_secret: Option<String>,
    pub session_ttl: Duration,
}

impl Default for ApiOptions {
    fn default() -> Self {
        ApiOptions {
            admin_secret: None,
            session_ttl: DEFAULT_TTL,
        }
    }
}

enum Job {
    Submit {
        request: TxRequest,
        reply: oneshot::Sender<Result<Receipt, EngineError>>,
    },
    Shutdown {
        reply: oneshot::Sender<io::Result<()>>,
    },
}

pub(crate) struct Shared {
    engine: Arc<RwLock<Engine>>,
    queue: mpsc::Sender<Job>,
    sessions: SessionStore,
    admin_secret: Option<String>,
}

impl Shared {
    pub(crate) fn engine(&self) -> RwLockReadGuard<'_, Engine> {
        self.engine.read().expect("engine lock poisoned")
    }

    /// Queues `request` for the writer and waits until it is applied and
    /// persisted, or rejected.
    pub(crate) async fn submit(&self, request: TxRequest) -> Result<Receipt, ApiError> {
        let (reply, rx) = oneshot::channel();
        let unavailable = || {
            ApiError::new(
                axum::http::StatusCode::SERVICE_UNAVAILABLE,
                "WriterUnavailable",
                "the ledger writer has stopped",
            )
        };
        self.queue
            .send(Job::Submit { request, reply })
            .map_err(|_| unavailable())?;
        Ok(rx.await.map_err(|_| unavailable())??)
    }
}

/// A running engine behind the HTTP API.
pub struct Service {
    shared: Arc<Shared>,
    writer: Option<JoinHandle<()>>,
}

impl Service {
    /// In-memory service: nothing is persisted.
    pub fn in_memory(engine: Engine, options: ApiOptions) -> Self {
        Self::start(engine, None, options)
    }

    pub fn with_sink(engine: Engine, sink: impl EventSink, options: ApiOptions) -> Self {
        Self::start(engine, Some(Box::new(sink)), options)
    }

    fn start(engine: Engine, mut sink: Option<Box<dyn EventSink>>, options: ApiOptions) -> Self {
        let engine = Arc::new(RwLock::new(engine));
        let (queue, jobs) = mpsc::channel::<Job>();
        let writer_engine = Arc::clone(&engine);
        let writer = std::thread::Builder::new()
            .name("ledger-writer".into())
            .spawn(move || {
                for job in jobs {
                    match job {
                        Job::Submit { request, reply } => {
                            let mut engine = writer_engine.write().expect("engine lock poisoned");
                            let result = engine.submit(request);
                            if result.is_ok() {
                                if let Some(sink) = sink.as_mut() {
                                    let event = engine.log().last().expect("event just applied");
                                    if let Err(e) = sink.persist(event, engine.state()) {
                                        tracing::error!("persisting event {}: {e}", event.seq);
                                        panic!("cannot persist event {}: {e}", event.seq);
                                    }
                                }
                            }
                            let _ = reply.send(result);
                        }
                        Job::Shutdown { reply } => {
                            let engine = writer_engine.read().expect("engine lock poisoned");
                            let done = sink.as_mut().map_or(Ok(()), |s| s.finish(engine.state()));
                            let _ = reply.send(done);
                            return;
                        }
                    }
                }
            })
            .expect("spawn writer thread");
        Service {
            shared: Arc::new(Shared {
                engine,
                queue,
                sessions: SessionStore::new(options.session_ttl),
                admin_secret: options.admin_secret,
            }),
            writer: Some(writer),
        }
    }

    pub fn router(&self) -> Router {
        routes::router(Arc::clone(&self.shared))
    }

    /// Read access to the live engine.
    pub fn engine(&self) -> RwLockReadGuard<'_, Engine> {
        self.shared.engine()
    }

    /// Drains queued writes, runs the sink's final step (the closing
    /// snapshot for [`DirSink`]) and stops the writer.
    pub async fn shutdown(mut self) -> io::Result<()> {
        let (reply, rx) = oneshot::channel();
        let result = match self.shared.queue.send(Job::Shutdown { reply }) {
            Ok(()) => rx.await.unwrap_or_else(|_| Err(io::Error::other("writer stopped"))),
            Err(_) => Err(io::Error::other("writer stopped")),
        };
        if let Some(handle) = self.writer.take() {
            let _ = tokio::task::spawn_blocking(move || handle.join()).await;
        }
        result
    }
}

/// JSON body whose parse failures, unknown fields included, are 422s.
pub(crate) struct Body<T>(pub T);

impl<S: Send + Sync, T: DeserializeOwned> FromRequest<S> for Body<T> {
    type Rejection = ApiError;

    async fn from_request(req: Request, state: &S) -> Result<Self, Self::Rejection> {
        axum::Json::<T>::from_request(req, state)
            .await
            .map(|j| Body(j.0))
            .map_err(|e: JsonRejection| ApiError::malformed(e.body_text()))
    }
}

/// Query string with the same 422 treatment.
pub(crate) struct Query<T>(pub T);

impl<S: Send + Sync, T: DeserializeOwned> FromRequestParts<S> for Query<T> {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &S) -> Result<Self, Self::Rejection> {
        axum::extract::Query::<T>::from_request_parts(parts, state)
            .await
            .map(|q| Query(q.0))
            .map_err(|e: QueryRejection| ApiError::malformed(e.body_text()))
    }
}

/// The caller's session, from `Authorization: Bearer <token>`.
pub(crate) struct Auth(pub Session);

impl FromRequestParts<Arc<Shared>> for Auth {
    type Rejection = ApiError;

    async fn from_request_parts(parts: &mut Parts, state: &Arc<Shared>) -> Result<Self, Self::Rejection> {
        let token = parts
            .headers
            .get(axum::http::header::AUTHORIZATION)
            .and_then(|v| v.to_str().ok())
            .and_then(|v| v.strip_prefix("Bearer "))
            .ok_or_else(|| ApiError::unauthorized("Unauthenticated", "missing bearer token"))?;
        state.sessions.resolve(token.trim()).map(Auth)
    }
}
