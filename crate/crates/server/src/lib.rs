//! HTTP/JSON front end: parse descriptions, synthesize, and refine a
//! session's candidates with new examples.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use regel_cli::e2e::{run_description, run_sketches, E2eConfig};
use regel_core::nlp::{parse, Grammar, Model, ParseConfig};
use regel_core::regex::{is_match, parse_regex, Regex};
use regel_core::sketch::parse_sketch;
use regel_core::synthesis::Examples;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use tokio::sync::Semaphore;
use tower_http::cors::{Any, CorsLayer};

#[derive(Debug, Clone)]
pub struct Config {
    /// Idle sessions are dropped after this long.
    pub ttl: Duration,
    /// Hard cap on one synthesis request, whatever the client asks for.
    pub ceiling: Duration,
    /// Synthesis jobs running at once.
    pub workers: usize,
    /// Allowed CORS origin; any origin when unset.
    pub origin: Option<String>,
    pub top_sketches: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            ttl: Duration::from_secs(30 * 60),
            ceiling: Duration::from_secs(60),
            workers: std::thread::available_parallelism().map_or(1, |n| n.get()),
            origin: None,
            top_sketches: 25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Matches {
    pub positive: Vec<bool>,
    pub negative: Vec<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CandidateOut {
    pub regex: String,
    pub sketch: String,
    pub matches: Matches,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SynthOut {
    pub session: String,
    pub candidates: Vec<CandidateOut>,
    pub timed_out: bool,
    pub sketches: Vec<String>,
}

#[derive(Debug, Deserialize)]
pub struct ParseIn {
    pub description: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoredSketch {
    pub text: String,
    pub score: f64,
}

#[derive(Debug, Clone, Deserialize)]
pub struct SynthIn {
    pub sketch: Option<String>,
    pub description: Option<String>,
    #[serde(default)]
    pub positives: Vec<String>,
    #[serde(default)]
    pub negatives: Vec<String>,
    #[serde(default = "default_top_k")]
    pub top_k: usize,
    pub timeout_ms: Option<u64>,
}

fn default_top_k() -> usize {
    3
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RefineIn {
    pub reject: String,
    #[serde(default)]
    pub new_positives: Vec<String>,
    #[serde(default)]
    pub new_negatives: Vec<String>,
}

#[derive(Debug, Clone)]
struct Session {
    request: SynthIn,
    examples: Examples,
    candidates: Vec<CandidateOut>,
    history: Vec<RefineIn>,
    last_used: Instant,
}

pub struct AppState {
    cfg: Config,
    grammar: Grammar,
    model: Model,
    sessions: Mutex<HashMap<String, Arc<tokio::sync::Mutex<Session>>>>,
    pool: Semaphore,
}

impl AppState {
    pub fn new(cfg: Config, grammar: Grammar, model: Model) -> Arc<AppState> {
        let pool = Semaphore::new(cfg.workers.max(1));
        Arc::new(AppState { cfg, grammar, model, sessions: Mutex::new(HashMap::new()), pool })
    }

    /// Drops sessions idle for longer than the TTL; returns how many.
    pub fn evict_expired(&self) -> usize {
        let ttl = self.cfg.ttl;
        let mut sessions = self.sessions.lock().unwrap();
        let before = sessions.len();
        sessions.retain(|_, s| s.try_lock().map_or(true, |s| s.last_used.elapsed() < ttl));
        before - sessions.len()
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().unwrap().len()
    }
}

#[derive(Debug)]
pub struct ApiError(StatusCode, String);

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.0, Json(serde_json::json!({ "error": self.1 }))).into_response()
    }
}

fn bad(msg: impl ToString) -> ApiError {
    ApiError(StatusCode::BAD_REQUEST, msg.to_string())
}

/// Any body that is not the expected JSON is a 400.
fn body<T: DeserializeOwned>(bytes: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(bytes).map_err(bad)
}

pub fn app(state: Arc<AppState>) -> Router {
    let cors = match &state.cfg.origin {
        Some(o) => CorsLayer::new().allow_origin(o.parse::<HeaderValue>().expect("valid origin")),
        None => CorsLayer::new().allow_origin(Any),
    }
    .allow_methods(Any)
    .allow_headers(Any);
    Router::new()
        .route("/parse", post(parse_handler))
        .route("/synthesize", post(synthesize_handler))
        .route("/session/{id}", get(session_handler))
        .route("/session/{id}/refine", post(refine_handler))
        .layer(cors)
        .with_state(state)
}

async fn parse_handler(State(st): State<Arc<AppState>>, bytes: Bytes) -> Result<Json<serde_json::Value>, ApiError> {
    let req: ParseIn = body(&bytes)?;
    let cfg = ParseConfig { limit: st.cfg.top_sketches, ..ParseConfig::default() };
    let sketches: Vec<ScoredSketch> = parse(&req.description, &st.grammar, &st.model, cfg)
        .into_iter()
        .map(|c| ScoredSketch { text: c.sketch.to_string(), score: c.probability })
        .collect();
    Ok(Json(serde_json::json!({ "sketches": sketches })))
}

fn matrix(r: &Regex, ex: &Examples) -> Matches {
    Matches {
        positive: ex.positives().iter().map(|s| is_match(r, s)).collect(),
        negative: ex.negatives().iter().map(|s| is_match(r, s)).collect(),
    }
}

/// Runs synthesis for `req` on `ex` on the worker pool.
async fn compute(st: &Arc<AppState>, req: &SynthIn, ex: &Examples) -> Result<(Vec<CandidateOut>, bool, Vec<String>), ApiError> {
    let sketch = match &req.sketch {
        Some(t) => Some(parse_sketch(t).map_err(|e| bad(format!("sketch: {e}")))?),
        None if req.description.is_some() => None,
        None => return Err(bad("a sketch or a description is required")),
    };
    let timeout = req.timeout_ms.map_or(st.cfg.ceiling, Duration::from_millis).min(st.cfg.ceiling);
    let cfg = E2eConfig { parallel: 1, top_sketches: st.cfg.top_sketches, timeout, top_k: req.top_k.max(1), ..E2eConfig::default() };
    let _permit = st.pool.acquire().await.expect("pool open");
    let (state, ex2, description) = (st.clone(), ex.clone(), req.description.clone().unwrap_or_default());
    let out = tokio::task::spawn_blocking(move || match sketch {
        Some(s) => run_sketches(vec![s], &ex2, &cfg),
        None => run_description(&description, &ex2, &state.grammar, &state.model, &cfg),
    })
    .await
    .map_err(|e| ApiError(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    let mut candidates = Vec::new();
    for t in &out.results {
        let m = matrix(&t.regex, ex);
        // every response is checked against the examples before it leaves
        if m.positive.iter().all(|&b| b) && m.negative.iter().all(|&b| !b) {
            candidates.push(CandidateOut { regex: t.regex.to_string(), sketch: t.sketch.to_string(), matches: m });
        } else {
            log::error!("dropping inconsistent candidate {}", t.regex);
        }
    }
    Ok((candidates, out.timed_out, out.sketches.iter().map(|s| s.to_string()).collect()))
}

async fn synthesize_handler(State(st): State<Arc<AppState>>, bytes: Bytes) -> Result<Json<SynthOut>, ApiError> {
    st.evict_expired();
    let req: SynthIn = body(&bytes)?;
    let ex = Examples::new(req.positives.clone(), req.negatives.clone()).map_err(bad)?;
    let (candidates, timed_out, sketches) = compute(&st, &req, &ex).await?;
    let id = uuid::Uuid::new_v4().simple().to_string();
    let session = Session { request: req, examples: ex, candidates: candidates.clone(), history: Vec::new(), last_used: Instant::now() };
    st.sessions.lock().unwrap().insert(id.clone(), Arc::new(tokio::sync::Mutex::new(session)));
    Ok(Json(SynthOut { session: id, candidates, timed_out, sketches }))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SessionOut {
    pub session: String,
    pub positives: Vec<String>,
    pub negatives: Vec<String>,
    pub candidates: Vec<CandidateOut>,
    pub history: Vec<RefineIn>,
}

fn lookup(st: &AppState, id: &str) -> Result<Arc<tokio::sync::Mutex<Session>>, ApiError> {
    st.evict_expired();
    let handle = st.sessions.lock().unwrap().get(id).cloned();
    handle.ok_or_else(|| ApiError(StatusCode::NOT_FOUND, format!("no session {id}")))
}

async fn session_handler(State(st): State<Arc<AppState>>, Path(id): Path<String>) -> Result<Json<SessionOut>, ApiError> {
    let handle = lookup(&st, &id)?;
    let mut s = handle.lock().await;
    s.last_used = Instant::now();
    Ok(Json(SessionOut {
        session: id,
        positives: s.examples.positives().to_vec(),
        negatives: s.examples.negatives().to_vec(),
        candidates: s.candidates.clone(),
        history: s.history.clone(),
    }))
}

async fn refine_handler(State(st): State<Arc<AppState>>, Path(id): Path<String>, bytes: Bytes) -> Result<Json<SynthOut>, ApiError> {
    let handle = lookup(&st, &id)?;
    // one refinement at a time per session
    let mut session = handle.lock().await;
    session.last_used = Instant::now();
    let req: RefineIn = body(&bytes)?;
    let rejected = parse_regex(&req.reject).map_err(|e| bad(format!("reject: {e}")))?;
    let rules_out = req.new_positives.iter().any(|s| !is_match(&rejected, s)) || req.new_negatives.iter().any(|s| is_match(&rejected, s));
    if !rules_out {
        return Err(ApiError(StatusCode::CONFLICT, "the new examples do not rule out the rejected candidate".into()));
    }
    let pos: Vec<String> = session.examples.positives().iter().chain(&req.new_positives).cloned().collect();
    let neg: Vec<String> = session.examples.negatives().iter().chain(&req.new_negatives).cloned().collect();
    let ex = Examples::new(dedup(pos), dedup(neg)).map_err(bad)?;
    let (mut candidates, timed_out, sketches) = compute(&st, &session.request, &ex).await?;
    candidates.retain(|c| c.regex != rejected.to_string());
    session.examples = ex;
    session.candidates = candidates.clone();
    session.history.push(req);
    session.last_used = Instant::now();
    Ok(Json(SynthOut { session: id, candidates, timed_out, sketches }))
}

fn dedup(v: Vec<String>) -> Vec<String> {
    let mut seen = std::collections::HashSet::new();
    v.into_iter().filter(|s| seen.insert(s.clone())).collect()
}
