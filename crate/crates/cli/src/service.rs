//! HTTP API over in-memory sessions.
//!
//! Every session holds at most one graph, one query and the lattice built
//! from them. Replacing either bumps the session version and throws away
//! execution state; requests that name an older version get 409.

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;
use std::time::{Duration, Instant};

use axum::extract::{Path, Query, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post, put};
use axum::{Json, Router};
use serde::Deserialize;
use serde_json::{json, Value};
use tokio::sync::Mutex;
use uuid::Uuid;

use qlattice::diagnostics::Diagnostic;
use qlattice::dsl::parse;
use qlattice::execute::{
    aggregate, execute_step, export, group_results, suggested_order, ExecError, ExecOptions, ExecutionState, Status,
    DEFAULT_LIMIT,
};
use qlattice::graph::{GraphDocument, PropertyGraph};
use qlattice::instantiate::{build_lattice, infer_directed, InstantiateError, InstantiationLattice, LatticeOptions};
use qlattice::query::{validate, QueryRepresentation};
use qlattice::translate::{translate, TranslateError};

pub const DEFAULT_IDLE: Duration = Duration::from_secs(30 * 60);

#[derive(Debug, Clone)]
pub struct ServiceConfig {
    pub idle_timeout: Duration,
    /// Loaded into every new session.
    pub preload: Option<Arc<PropertyGraph>>,
    pub ui_dir: Option<PathBuf>,
    pub lattice: LatticeOptions,
}

impl Default for ServiceConfig {
    fn default() -> Self {
        ServiceConfig {
            idle_timeout: DEFAULT_IDLE,
            preload: None,
            ui_dir: None,
            lattice: LatticeOptions::default(),
        }
    }
}

#[derive(Default)]
struct Session {
    version: u64,
    graph: Option<Arc<PropertyGraph>>,
    query: Option<QueryRepresentation>,
    lattice: Option<Arc<InstantiationLattice>>,
    state: ExecutionState,
}

struct Entry {
    session: Arc<Mutex<Session>>,
    touched: Instant,
}

#[derive(Clone)]
pub struct AppState {
    sessions: Arc<std::sync::Mutex<HashMap<Uuid, Entry>>>,
    config: Arc<ServiceConfig>,
}

impl AppState {
    pub fn new(config: ServiceConfig) -> Self {
        AppState {
            sessions: Default::default(),
            config: Arc::new(config),
        }
    }

    fn get(&self, id: &str) -> Result<Arc<Mutex<Session>>, ApiError> {
        let key = Uuid::parse_str(id).map_err(|_| ApiError::not_found(format!("unknown session {id}")))?;
        let mut map = self.sessions.lock().expect("session map lock");
        let entry = map
            .get_mut(&key)
            .ok_or_else(|| ApiError::not_found(format!("unknown session {id}")))?;
        entry.touched = Instant::now();
        Ok(entry.session.clone())
    }

    /// Drops sessions idle for longer than the configured timeout.
    pub fn evict_idle(&self) -> usize {
        let limit = self.config.idle_timeout;
        let mut map = self.sessions.lock().expect("session map lock");
        let before = map.len();
        map.retain(|_, e| e.touched.elapsed() < limit);
        before - map.len()
    }

    pub fn session_count(&self) -> usize {
        self.sessions.lock().expect("session map lock").len()
    }
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    body: Value,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        ApiError {
            status,
            body: json!({ "error": message.into() }),
        }
    }

    fn not_found(message: impl Into<String>) -> Self {
        Self::new(StatusCode::NOT_FOUND, message)
    }

    fn conflict(message: impl Into<String>) -> Self {
        Self::new(StatusCode::CONFLICT, message)
    }

    fn invalid(message: impl Into<String>, diagnostics: &[Diagnostic]) -> Self {
        let rules: Vec<&str> = diagnostics.iter().filter_map(|d| d.subject.as_deref()).collect();
        ApiError {
            status: StatusCode::BAD_REQUEST,
            body: json!({ "error": message.into(), "diagnostics": diagnostics, "subjects": rules }),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(self.body)).into_response()
    }
}

impl From<InstantiateError> for ApiError {
    fn from(e: InstantiateError) -> Self {
        match e {
            InstantiateError::Invalid(d) => ApiError::invalid("query is invalid", &d),
            e if e.is_size_error() => ApiError::new(StatusCode::UNPROCESSABLE_ENTITY, e.to_string()),
            e => ApiError::new(StatusCode::BAD_REQUEST, e.to_string()),
        }
    }
}

impl From<ExecError> for ApiError {
    fn from(e: ExecError) -> Self {
        let status = match e {
            ExecError::UnknownStep(_) | ExecError::UnknownInstance(_) => StatusCode::NOT_FOUND,
            ExecError::NotExecuted(_) | ExecError::NoResults(_) => StatusCode::CONFLICT,
            ExecError::ModeMismatch { .. } | ExecError::UndirectedEdge { .. } | ExecError::ZeroLimit => {
                StatusCode::BAD_REQUEST
            }
        };
        ApiError::new(status, e.to_string())
    }
}

type ApiResult = Result<Json<Value>, ApiError>;

pub fn router(state: AppState) -> Router {
    let ui = state.config.ui_dir.clone();
    let api = Router::new()
        .route("/api/session", post(create_session))
        .route("/api/session/{id}", get(session_info).delete(delete_session))
        .route("/api/session/{id}/graph", post(put_graph))
        .route("/api/session/{id}/query", put(put_query))
        .route("/api/session/{id}/lattice", get(get_lattice))
        .route("/api/session/{id}/execute", post(execute))
        .route("/api/session/{id}/results", get(get_export))
        .route("/api/session/{id}/results/{instance}", get(get_results))
        .route("/api/session/{id}/overview", get(get_overview))
        .route("/api/session/{id}/translate/{instance}", get(get_translation))
        .with_state(state);
    match ui {
        Some(dir) => api.fallback_service(tower_http::services::ServeDir::new(dir)),
        None => api,
    }
}

/// Runs the service until the listener fails, evicting idle sessions once a
/// minute.
pub async fn serve(listener: tokio::net::TcpListener, config: ServiceConfig) -> std::io::Result<()> {
    let state = AppState::new(config);
    let sweeper = state.clone();
    tokio::spawn(async move {
        let mut tick = tokio::time::interval(Duration::from_secs(60));
        loop {
            tick.tick().await;
            sweeper.evict_idle();
        }
    });
    axum::serve(listener, router(state)).await
}

async fn create_session(State(app): State<AppState>) -> ApiResult {
    let id = Uuid::new_v4();
    let session = Session {
        graph: app.config.preload.clone(),
        ..Default::default()
    };
    app.sessions.lock().expect("session map lock").insert(
        id,
        Entry {
            session: Arc::new(Mutex::new(session)),
            touched: Instant::now(),
        },
    );
    Ok(Json(json!({ "session_id": id.to_string(), "version": 0 })))
}

async fn delete_session(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult {
    app.get(&id)?;
    if let Ok(key) = Uuid::parse_str(&id) {
        app.sessions.lock().expect("session map lock").remove(&key);
    }
    Ok(Json(json!({ "deleted": id })))
}

fn statuses_json(s: &Session) -> Value {
    json!(s.state.statuses())
}

async fn session_info(State(app): State<AppState>, Path(id): Path<String>) -> ApiResult {
    let session = app.get(&id)?;
    let s = session.lock().await;
    Ok(Json(json!({
        "session_id": id,
        "version": s.version,
        "graph": s.graph.as_ref().map(|g| graph_info(g)),
        "lattice": s.lattice.as_ref().map(|l| l.summary()),
        "suggested_order": s.lattice.as_ref().map(|l| suggested_order(l)),
        "statuses": statuses_json(&s),
    })))
}

fn graph_info(g: &PropertyGraph) -> Value {
    json!({ "directed": g.is_directed(), "nodes": g.node_count(), "edges": g.edge_count() })
}

async fn rebuild(s: &mut Session, opts: &LatticeOptions) -> Result<(), ApiError> {
    s.version += 1;
    s.lattice = None;
    s.state = ExecutionState::default();
    let Some(qr) = s.query.clone() else {
        return Ok(());
    };
    let opts = LatticeOptions {
        directed: Some(match &s.graph {
            Some(g) => g.is_directed(),
            None => infer_directed(&qr),
        }),
        ..opts.clone()
    };
    let lattice = tokio::task::spawn_blocking(move || build_lattice(&qr, &opts))
        .await
        .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))??;
    s.state = ExecutionState::new(&lattice);
    s.lattice = Some(Arc::new(lattice));
    Ok(())
}

async fn put_graph(State(app): State<AppState>, Path(id): Path<String>, body: String) -> ApiResult {
    let session = app.get(&id)?;
    let doc: GraphDocument =
        serde_json::from_str(&body).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("bad graph document: {e}")))?;
    let graph = PropertyGraph::from_document(doc).map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
    let mut s = session.lock().await;
    s.graph = Some(Arc::new(graph));
    let opts = app.config.lattice.clone();
    let rebuilt = rebuild(&mut s, &opts).await;
    if let Err(e) = rebuilt {
        s.query = None;
        return Err(e);
    }
    Ok(Json(json!({
        "version": s.version,
        "graph": graph_info(s.graph.as_deref().expect("graph was just set")),
        "lattice": s.lattice.as_ref().map(|l| l.summary()),
    })))
}

/// Query bodies: DSL text, `{"dsl": "..."}`, or a serialized representation.
fn parse_query_body(body: &str) -> Result<(QueryRepresentation, Vec<Diagnostic>), ApiError> {
    let dsl = |text: &str| {
        parse(text)
            .map(|p| (p.query, p.warnings))
            .map_err(|d| ApiError::invalid("query does not parse", &d))
    };
    if body.trim_start().starts_with('{') {
        if let Ok(Value::Object(map)) = serde_json::from_str::<Value>(body) {
            if let Some(Value::String(text)) = map.get("dsl") {
                return dsl(text);
            }
            let qr: QueryRepresentation = serde_json::from_value(Value::Object(map))
                .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("bad query representation: {e}")))?;
            let diags = validate(&qr);
            if diags.iter().any(Diagnostic::is_error) {
                return Err(ApiError::invalid("query is invalid", &diags));
            }
            return Ok((qr, diags));
        }
    }
    dsl(body)
}

async fn put_query(State(app): State<AppState>, Path(id): Path<String>, body: String) -> ApiResult {
    let session = app.get(&id)?;
    let (qr, warnings) = parse_query_body(&body)?;
    let mut s = session.lock().await;
    s.query = Some(qr);
    let opts = app.config.lattice.clone();
    let rebuilt = rebuild(&mut s, &opts).await;
    if let Err(e) = rebuilt {
        s.query = None;
        return Err(e);
    }
    Ok(Json(json!({
        "version": s.version,
        "diagnostics": warnings,
        "lattice": s.lattice.as_ref().map(|l| l.summary()),
    })))
}

fn lattice_of(s: &Session) -> Result<Arc<InstantiationLattice>, ApiError> {
    s.lattice.clone().ok_or_else(|| ApiError::conflict("no query loaded"))
}

fn check_version(s: &Session, version: Option<u64>) -> Result<(), ApiError> {
    match version {
        Some(v) if v != s.version => Err(ApiError::conflict(format!(
            "session is at version {}, request refers to version {v}; reload the lattice",
            s.version
        ))),
        _ => Ok(()),
    }
}

async fn get_lattice(State(app): State<AppState>, Path(id): Path<String>) -> Result<Response, ApiError> {
    let session = app.get(&id)?;
    let s = session.lock().await;
    let lattice = lattice_of(&s)?;
    let mut body = serde_json::to_value(&*lattice).expect("lattices serialize");
    body["version"] = json!(s.version);
    Ok(Json(body).into_response())
}

#[derive(Debug, Deserialize)]
struct ExecuteBody {
    step: String,
    limit: Option<usize>,
    version: Option<u64>,
    time_budget_ms: Option<u64>,
}

async fn execute(State(app): State<AppState>, Path(id): Path<String>, Json(body): Json<ExecuteBody>) -> ApiResult {
    let session = app.get(&id)?;
    // holding the session lock for the whole run queues concurrent requests
    let mut s = session.lock().await;
    check_version(&s, body.version)?;
    let lattice = lattice_of(&s)?;
    let graph = s.graph.clone().ok_or_else(|| ApiError::conflict("no graph loaded"))?;
    let mut state = std::mem::take(&mut s.state);
    let opts = ExecOptions {
        limit: body.limit.unwrap_or(DEFAULT_LIMIT),
        time_budget: body.time_budget_ms.map(Duration::from_millis),
    };
    let step = body.step.clone();
    let (state, report) = tokio::task::spawn_blocking(move || {
        let report = execute_step(&lattice, &graph, &mut state, &step, &opts);
        (state, report)
    })
    .await
    .map_err(|e| ApiError::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()))?;
    s.state = state;
    let report = report?;
    Ok(Json(json!({
        "version": s.version,
        "report": report,
        "statuses": statuses_json(&s),
    })))
}

#[derive(Debug, Deserialize)]
struct VersionParam {
    version: Option<u64>,
    limit: Option<usize>,
    instances: Option<String>,
}

async fn get_results(
    State(app): State<AppState>,
    Path((id, instance)): Path<(String, String)>,
    Query(q): Query<VersionParam>,
) -> ApiResult {
    let session = app.get(&id)?;
    let s = session.lock().await;
    check_version(&s, q.version)?;
    let lattice = lattice_of(&s)?;
    let group = group_results(&lattice, &s.state, &instance)?;
    Ok(Json(json!(group)))
}

async fn get_export(State(app): State<AppState>, Path(id): Path<String>, Query(q): Query<VersionParam>) -> ApiResult {
    let session = app.get(&id)?;
    let s = session.lock().await;
    check_version(&s, q.version)?;
    let lattice = lattice_of(&s)?;
    Ok(Json(json!(export(&lattice, &s.state))))
}

async fn get_overview(State(app): State<AppState>, Path(id): Path<String>, Query(q): Query<VersionParam>) -> ApiResult {
    let session = app.get(&id)?;
    let s = session.lock().await;
    check_version(&s, q.version)?;
    lattice_of(&s)?;
    let ids: Vec<String> = match q.instances.as_deref() {
        Some(list) => list.split(',').map(str::trim).filter(|x| !x.is_empty()).map(String::from).collect(),
        None => s
            .state
            .statuses()
            .iter()
            .filter(|(_, st)| matches!(st, Status::Found { .. }))
            .map(|(id, _)| id.clone())
            .collect(),
    };
    Ok(Json(json!(aggregate(&s.state, &ids)?)))
}

async fn get_translation(
    State(app): State<AppState>,
    Path((id, instance)): Path<(String, String)>,
    Query(q): Query<VersionParam>,
) -> ApiResult {
    let session = app.get(&id)?;
    let s = session.lock().await;
    check_version(&s, q.version)?;
    let lattice = lattice_of(&s)?;
    let inst = lattice
        .instance(&instance)
        .ok_or_else(|| ApiError::not_found(format!("unknown instance `{instance}`")))?;
    let t = translate(inst, q.limit).map_err(|e| match e {
        TranslateError::NotConcrete(_) | TranslateError::Empty(_) => ApiError::new(StatusCode::BAD_REQUEST, e.to_string()),
    })?;
    Ok(Json(json!(t)))
}
