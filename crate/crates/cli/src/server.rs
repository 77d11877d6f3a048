//! HTTP/JSON service and server-sent frame streams.

use std::collections::HashMap;
use std::convert::Infallible;
use std::net::SocketAddr;
use std::path::PathBuf;
use std::sync::{Arc, Mutex};
use std::time::Duration;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::sse::{Event, KeepAlive, Sse};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use futures::Stream;
use onto4mat::geom::Vec2;
use onto4mat::intent::{Decision, MissionStatus};
use onto4mat::sim::{self, Frame};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use tokio::net::TcpListener;
use tokio::sync::watch;
use tower_http::services::ServeDir;

use crate::missions::{ErrorClass, IntentInput, Service, ServiceError};

const PLACEHOLDER: &str = include_str!("../static/index.html");

/// JSON error body `{error, detail}` with a status derived from the error.
#[derive(Debug)]
pub struct ApiError(pub ServiceError);

impl From<ServiceError> for ApiError {
    fn from(e: ServiceError) -> Self {
        ApiError(e)
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = match self.0.class() {
            ErrorClass::BadRequest => StatusCode::BAD_REQUEST,
            ErrorClass::NotFound => StatusCode::NOT_FOUND,
            ErrorClass::Conflict => StatusCode::CONFLICT,
            ErrorClass::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        };
        let body = json!({ "error": self.0.code(), "detail": self.0.to_string() });
        (status, Json(body)).into_response()
    }
}

type ApiResult<T> = Result<T, ApiError>;

fn body<T: DeserializeOwned>(bytes: &Bytes) -> Result<T, ApiError> {
    let bytes: &[u8] = if bytes.iter().all(u8::is_ascii_whitespace) { b"{}" } else { bytes };
    serde_json::from_slice(bytes)
        .map_err(|e| ApiError(ServiceError::BadRequest(format!("malformed body: {e}"))))
}

async fn blocking<T: Send + 'static>(
    f: impl FnOnce() -> Result<T, ServiceError> + Send + 'static,
) -> ApiResult<T> {
    tokio::task::spawn_blocking(f)
        .await
        .map_err(|e| ApiError(ServiceError::Internal(e.to_string())))?
        .map_err(ApiError)
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Progress {
    frames: usize,
    finished: Option<MissionStatus>,
}

struct RunChannel {
    frames: Mutex<Vec<Frame>>,
    progress: watch::Sender<Progress>,
}

#[derive(Clone)]
pub struct AppState {
    service: Service,
    runs: Arc<Mutex<HashMap<String, Arc<RunChannel>>>>,
}

impl AppState {
    pub fn new(service: Service) -> AppState {
        AppState {
            service,
            runs: Arc::default(),
        }
    }
}

pub fn router(service: Service, assets: Option<PathBuf>) -> Router {
    let api = Router::new()
        .route("/api/ontology/metrics", get(metrics))
        .route("/api/ontology/classes", get(classes))
        .route("/api/ontology/individuals", get(individuals))
        .route("/api/query", post(query))
        .route("/api/intent", post(intent))
        .route("/api/mission/{id}", get(mission))
        .route("/api/mission/{id}/approve", post(approve))
        .route("/api/mission/{id}/reject", post(reject))
        .route("/api/mission/{id}/run", post(run))
        .route("/api/mission/{id}/stream", get(stream))
        .route("/api/lint", get(lint))
        .with_state(AppState::new(service));
    match assets {
        Some(dir) => api.fallback_service(ServeDir::new(dir)),
        None => api.route("/", get(|| async { Html(PLACEHOLDER) })),
    }
}

/// Binds `addr` and serves until the returned handle is dropped or aborted.
pub async fn spawn(
    service: Service,
    assets: Option<PathBuf>,
    addr: SocketAddr,
) -> std::io::Result<(SocketAddr, tokio::task::JoinHandle<std::io::Result<()>>)> {
    let listener = TcpListener::bind(addr).await?;
    let local = listener.local_addr()?;
    let app = router(service, assets);
    Ok((local, tokio::spawn(async move { axum::serve(listener, app).await })))
}

/// Serves until ctrl-c.
pub async fn serve(service: Service, assets: Option<PathBuf>, addr: SocketAddr) -> std::io::Result<()> {
    let listener = TcpListener::bind(addr).await?;
    eprintln!("listening on http://{}", listener.local_addr()?);
    axum::serve(listener, router(service, assets))
        .with_graceful_shutdown(async {
            let _ = tokio::signal::ctrl_c().await;
        })
        .await
}

async fn metrics(State(s): State<AppState>) -> Json<Value> {
    Json(json!(s.service.ontology().metrics()))
}

async fn classes(State(s): State<AppState>) -> Json<Value> {
    let m = s.service.model();
    let list: Vec<Value> = s
        .service
        .ontology()
        .concepts()
        .values()
        .map(|c| {
            let supers: Vec<&String> = m.superconcepts(&c.name).filter(|x| **x != c.name).collect();
            json!({
                "name": c.name,
                "kind": c.kind,
                "parents": c.parents,
                "superconcepts": supers,
                "definition": c.definition.as_ref().map(|d| d.to_string()),
                "label": c.label,
                "comment": c.comment,
            })
        })
        .collect();
    Json(Value::Array(list))
}

async fn individuals(State(s): State<AppState>) -> Json<Value> {
    let m = s.service.model();
    let list: Vec<Value> = s
        .service
        .ontology()
        .individuals()
        .values()
        .map(|i| {
            json!({
                "name": i.name,
                "asserted": i.types,
                "types": m.memberships().get(&i.name).cloned().unwrap_or_default(),
                "label": i.label,
            })
        })
        .collect();
    Json(Value::Array(list))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct QueryBody {
    expr: String,
    #[serde(default)]
    mission: Option<String>,
}

async fn query(State(s): State<AppState>, bytes: Bytes) -> ApiResult<Json<Value>> {
    let q: QueryBody = body(&bytes)?;
    let service = s.service.clone();
    let r = blocking(move || service.query(&q.expr, q.mission.as_deref())).await?;
    Ok(Json(json!({ "individuals": r.individuals, "expression": r.expression.to_string() })))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IntentBody {
    intent: String,
    goal: [f64; 2],
    sheep: u32,
    #[serde(default)]
    seed: Option<u64>,
}

async fn intent(State(s): State<AppState>, bytes: Bytes) -> ApiResult<Json<Value>> {
    let b: IntentBody = body(&bytes)?;
    let input = IntentInput {
        intent: b.intent,
        goal: Vec2::new(b.goal[0], b.goal[1]),
        sheep: b.sheep,
        seed: b.seed,
    };
    let service = s.service.clone();
    let rec = blocking(move || service.resolve(&input)).await?;
    Ok(Json(json!({
        "id": rec.id(),
        "status": rec.status(),
        "behaviours": rec.plan.behaviours,
        "plan": rec.plan,
        "brief": rec.brief,
    })))
}

async fn mission(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    let service = s.service.clone();
    let rec = blocking(move || service.get(&id)).await?;
    Ok(Json(json!(rec)))
}

async fn decide(s: AppState, id: String, d: Decision) -> ApiResult<Json<Value>> {
    let service = s.service.clone();
    let rec = blocking(move || service.decide(&id, d)).await?;
    Ok(Json(json!(rec)))
}

async fn approve(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    decide(s, id, Decision::Approve).await
}

async fn reject(State(s): State<AppState>, Path(id): Path<String>) -> ApiResult<Json<Value>> {
    decide(s, id, Decision::Reject).await
}

#[derive(Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct RunBody {
    #[serde(default)]
    frame_interval_ms: Option<u64>,
}

async fn run(
    State(s): State<AppState>,
    Path(id): Path<String>,
    bytes: Bytes,
) -> ApiResult<(StatusCode, Json<Value>)> {
    let b: RunBody = body(&bytes)?;
    let interval = Duration::from_millis(
        b.frame_interval_ms
            .unwrap_or_else(|| s.service.defaults().frame_interval_ms()),
    );
    let service = s.service.clone();
    let run_id = id.clone();
    let started = blocking(move || service.start_run(&run_id)).await?;
    let (tx, _) = watch::channel(Progress {
        frames: 0,
        finished: None,
    });
    let chan = Arc::new(RunChannel {
        frames: Mutex::new(Vec::new()),
        progress: tx,
    });
    s.runs.lock().expect("runs").insert(id.clone(), chan.clone());
    let body = json!(started.record);
    let service = s.service.clone();
    tokio::task::spawn_blocking(move || {
        let mut state = started.state;
        let mut all = Vec::new();
        let mut error = None;
        while !state.complete {
            match sim::step(&state, &started.config) {
                Ok(next) => state = next,
                Err(e) => {
                    error = Some(e);
                    break;
                }
            }
            let f = state.frame();
            chan.frames.lock().expect("frames").push(f.clone());
            all.push(f);
            chan.progress.send_modify(|p| p.frames += 1);
            if !interval.is_zero() {
                std::thread::sleep(interval);
            }
        }
        let status = match error {
            None => service
                .finish_run(started.record, &state, &all, None)
                .map(|r| r.status())
                .unwrap_or(MissionStatus::Failed),
            Some(_) => {
                service.store().set_live(&id, false);
                MissionStatus::Failed
            }
        };
        chan.progress.send_modify(|p| p.finished = Some(status));
    });
    Ok((StatusCode::ACCEPTED, Json(body)))
}

#[derive(Serialize)]
struct Done {
    status: MissionStatus,
    t: u64,
}

fn frame_event(f: &Frame) -> Event {
    Event::default()
        .event("frame")
        .data(serde_json::to_string(f).expect("frame serializes"))
}

fn done_event(status: MissionStatus, t: u64) -> Event {
    Event::default()
        .event("done")
        .data(serde_json::to_string(&Done { status, t }).expect("done serializes"))
}

async fn stream(
    State(s): State<AppState>,
    Path(id): Path<String>,
) -> ApiResult<Sse<impl Stream<Item = Result<Event, Infallible>>>> {
    let live = s.runs.lock().expect("runs").get(&id).cloned();
    let source = match live {
        Some(chan) => Source::Live(chan.progress.subscribe(), chan),
        None => {
            let service = s.service.clone();
            let rec = blocking(move || service.get(&id)).await?;
            let path = match (rec.status(), &rec.trajectory_path) {
                (MissionStatus::Succeeded | MissionStatus::Failed, Some(p)) => p.clone(),
                (status, _) => {
                    return Err(ApiError(ServiceError::Intent(
                        onto4mat::intent::IntentError::InvalidStatus {
                            from: status,
                            to: MissionStatus::Running,
                        },
                    )))
                }
            };
            let frames = blocking(move || {
                let text = std::fs::read_to_string(&path)
                    .map_err(|e| ServiceError::Internal(e.to_string()))?;
                sim::parse_trajectory(&text).map_err(|e| ServiceError::Internal(e.to_string()))
            })
            .await?;
            Source::Replay(frames, rec.status())
        }
    };
    let events = futures::stream::unfold((source, 0usize, false), |(source, idx, done)| async move {
        if done {
            return None;
        }
        match source {
            Source::Replay(frames, status) => {
                if let Some(f) = frames.get(idx) {
                    let e = frame_event(f);
                    Some((Ok(e), (Source::Replay(frames, status), idx + 1, false)))
                } else {
                    let t = frames.last().map_or(0, |f| f.t);
                    Some((Ok(done_event(status, t)), (Source::Replay(frames, status), idx, true)))
                }
            }
            Source::Live(mut rx, chan) => loop {
                let p = *rx.borrow_and_update();
                if idx < p.frames {
                    let e = frame_event(&chan.frames.lock().expect("frames")[idx]);
                    return Some((Ok(e), (Source::Live(rx, chan), idx + 1, false)));
                }
                if let Some(status) = p.finished {
                    let t = chan.frames.lock().expect("frames").last().map_or(0, |f| f.t);
                    return Some((Ok(done_event(status, t)), (Source::Live(rx, chan), idx, true)));
                }
                if rx.changed().await.is_err() {
                    return None;
                }
            },
        }
    });
    Ok(Sse::new(events).keep_alive(KeepAlive::default()))
}

enum Source {
    Replay(Vec<Frame>, MissionStatus),
    Live(watch::Receiver<Progress>, Arc<RunChannel>),
}

async fn lint(State(s): State<AppState>) -> ApiResult<Json<Value>> {
    let service = s.service.clone();
    let (report, meta) = blocking(move || service.validate()).await?;
    Ok(Json(json!({ "lint": report, "ontoclean": meta })))
}
